use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{C64, MAX_OAM_TRUNCATION, NORM_TOLERANCE};
use crate::{Error, Result};

/// Photon spin (circular polarization handedness).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Plus, Spin::Minus];

    /// Eigenvalue of the spin operator in units of hbar.
    pub fn sign(self) -> i32 {
        match self {
            Spin::Plus => 1,
            Spin::Minus => -1,
        }
    }

    /// Position in the `{sigma+, sigma-}` basis.
    pub fn index(self) -> usize {
        match self {
            Spin::Plus => 0,
            Spin::Minus => 1,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Spin> {
        match sign {
            1 => Ok(Spin::Plus),
            -1 => Ok(Spin::Minus),
            other => Err(Error::InvalidParameter(format!(
                "spin must be +1 or -1, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spin::Plus => write!(f, "σ+"),
            Spin::Minus => write!(f, "σ-"),
        }
    }
}

impl Serialize for Spin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i32(self.sign())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let sign = i32::deserialize(d)?;
        Spin::from_sign(sign).map_err(serde::de::Error::custom)
    }
}

/// A joint spin/OAM basis element `|sigma>|l>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mode {
    pub spin: Spin,
    pub oam: i32,
}

impl Mode {
    pub const fn new(spin: Spin, oam: i32) -> Self {
        Mode { spin, oam }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}, ℓ={}⟩", self.spin, self.oam)
    }
}

fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn normalized(mut amps: Vec<C64>) -> Result<Vec<C64>> {
    let norm = norm_sqr(&amps).sqrt();
    if !norm.is_finite() || norm < 1e-300 {
        return Err(Error::ZeroNorm);
    }
    for a in &mut amps {
        *a /= norm;
    }
    Ok(amps)
}

fn inner(lhs: &[C64], rhs: &[C64]) -> C64 {
    lhs.iter().zip(rhs).map(|(a, b)| a.conj() * b).sum()
}

fn check_truncation(l_max: usize) -> Result<()> {
    if l_max > MAX_OAM_TRUNCATION {
        return Err(Error::TruncationTooLarge {
            requested: l_max,
            max: MAX_OAM_TRUNCATION,
        });
    }
    Ok(())
}

/// Polarization state in the circular basis `{sigma+, sigma-}`.
///
/// The Jones representation in the `{H, V}` basis is
/// `|sigma+> = (|H> - i|V>)/sqrt2` and `|sigma-> = (|H> + i|V>)/sqrt2`, which
/// gives `|H> = (|sigma+> + |sigma->)/sqrt2`. This handedness makes a half-wave
/// plate at angle `theta` map `|sigma+>` to `exp(-2i theta)|sigma->`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinKet {
    amps: [C64; 2],
}

impl SpinKet {
    /// Builds a normalized ket from circular-basis amplitudes.
    pub fn new(plus: C64, minus: C64) -> Result<Self> {
        let v = normalized(vec![plus, minus])?;
        Ok(SpinKet { amps: [v[0], v[1]] })
    }

    pub fn basis(spin: Spin) -> Self {
        let mut amps = [C64::new(0.0, 0.0); 2];
        amps[spin.index()] = C64::new(1.0, 0.0);
        SpinKet { amps }
    }

    pub fn sigma_plus() -> Self {
        Self::basis(Spin::Plus)
    }

    pub fn sigma_minus() -> Self {
        Self::basis(Spin::Minus)
    }

    /// `|H> = (|sigma+> + |sigma->)/sqrt2`.
    pub fn horizontal() -> Self {
        let a = C64::new(FRAC_1_SQRT_2, 0.0);
        SpinKet { amps: [a, a] }
    }

    /// `|V> = (|sigma+> - |sigma->)/(sqrt2 i)`.
    pub fn vertical() -> Self {
        let a = C64::new(0.0, -FRAC_1_SQRT_2);
        SpinKet { amps: [a, -a] }
    }

    /// `|D> = (|H> + |V>)/sqrt2`.
    pub fn diagonal() -> Self {
        Self::from_jones(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).expect("nonzero")
    }

    /// `|A> = (|H> - |V>)/sqrt2`.
    pub fn antidiagonal() -> Self {
        Self::from_jones(C64::new(1.0, 0.0), C64::new(-1.0, 0.0)).expect("nonzero")
    }

    /// Converts a Jones vector `(E_H, E_V)` into the circular basis, normalizing it.
    pub fn from_jones(h: C64, v: C64) -> Result<Self> {
        let i = C64::i();
        let s = FRAC_1_SQRT_2;
        Self::new((h + i * v) * s, (h - i * v) * s)
    }

    /// Jones vector `(E_H, E_V)` of this state.
    pub fn jones(&self) -> [C64; 2] {
        let [p, m] = self.amps;
        let s = FRAC_1_SQRT_2;
        [(p + m) * s, -C64::i() * (p - m) * s]
    }

    pub(crate) fn from_jones_unnormalized(jones: [C64; 2]) -> [C64; 2] {
        let i = C64::i();
        let s = FRAC_1_SQRT_2;
        let [h, v] = jones;
        [(h + i * v) * s, (h - i * v) * s]
    }

    pub fn amplitude(&self, spin: Spin) -> C64 {
        self.amps[spin.index()]
    }

    pub fn amplitudes(&self) -> &[C64; 2] {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SpinKet) -> C64 {
        inner(&self.amps, &other.amps)
    }

    /// `|<self|other>|`, the global-phase-free overlap.
    pub fn overlap(&self, other: &SpinKet) -> f64 {
        self.inner(other).norm()
    }
}

/// OAM state over `l in {-L, ..., L}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OamKet {
    l_max: usize,
    amps: Vec<C64>,
}

impl OamKet {
    /// Normalized ket from `2L+1` amplitudes ordered `l = -L .. L`.
    pub fn new(l_max: usize, amps: Vec<C64>) -> Result<Self> {
        check_truncation(l_max)?;
        if amps.len() != 2 * l_max + 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * l_max + 1,
                found: amps.len(),
            });
        }
        Ok(OamKet {
            l_max,
            amps: normalized(amps)?,
        })
    }

    pub fn basis(l_max: usize, oam: i32) -> Result<Self> {
        check_truncation(l_max)?;
        if oam.unsigned_abs() as usize > l_max {
            return Err(Error::OamOverflow {
                oam,
                shift: 0,
                l_max,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 2 * l_max + 1];
        amps[(oam + l_max as i32) as usize] = C64::new(1.0, 0.0);
        Ok(OamKet { l_max, amps })
    }

    /// Superposition given as `(l, amplitude)` pairs, normalized.
    pub fn superposition(l_max: usize, terms: &[(i32, C64)]) -> Result<Self> {
        check_truncation(l_max)?;
        let mut amps = vec![C64::new(0.0, 0.0); 2 * l_max + 1];
        for &(oam, a) in terms {
            if oam.unsigned_abs() as usize > l_max {
                return Err(Error::OamOverflow {
                    oam,
                    shift: 0,
                    l_max,
                });
            }
            amps[(oam + l_max as i32) as usize] += a;
        }
        Self::new(l_max, amps)
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// Amplitude at `oam`, zero outside the truncation.
    pub fn amplitude(&self, oam: i32) -> C64 {
        if oam.unsigned_abs() as usize > self.l_max {
            return C64::new(0.0, 0.0);
        }
        self.amps[(oam + self.l_max as i32) as usize]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn inner(&self, other: &OamKet) -> C64 {
        let l = self.l_max.max(other.l_max) as i32;
        (-l..=l)
            .map(|m| self.amplitude(m).conj() * other.amplitude(m))
            .sum()
    }
}

/// Pure state on the spin x OAM product space.
///
/// Amplitudes are stored spin-major: index `s * (2L+1) + (l + L)` with
/// `s = 0` for sigma+ and `s = 1` for sigma-.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    l_max: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(l_max: usize, amps: Vec<C64>) -> Result<Self> {
        check_truncation(l_max)?;
        let dim = 2 * (2 * l_max + 1);
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        Ok(PureState {
            l_max,
            amps: normalized(amps)?,
        })
    }

    /// Superposition given as `(mode, amplitude)` pairs, normalized.
    pub fn superposition(l_max: usize, terms: &[(Mode, C64)]) -> Result<Self> {
        check_truncation(l_max)?;
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (2 * l_max + 1)];
        for &(mode, a) in terms {
            if mode.oam.unsigned_abs() as usize > l_max {
                return Err(Error::OamOverflow {
                    oam: mode.oam,
                    shift: 0,
                    l_max,
                });
            }
            amps[Self::index_in(l_max, mode)] += a;
        }
        Self::new(l_max, amps)
    }

    pub fn basis(l_max: usize, mode: Mode) -> Result<Self> {
        Self::superposition(l_max, &[(mode, C64::new(1.0, 0.0))])
    }

    /// Product state `|spin> (x) |oam>`.
    pub fn tensor(spin: &SpinKet, oam: &OamKet) -> Self {
        let l_max = oam.l_max();
        let amps = Spin::BOTH
            .iter()
            .flat_map(|&s| oam.amplitudes().iter().map(move |&o| spin.amplitude(s) * o))
            .collect();
        // Both factors are normalized, so the product is too.
        PureState { l_max, amps }
    }

    fn index_in(l_max: usize, mode: Mode) -> usize {
        mode.spin.index() * (2 * l_max + 1) + (mode.oam + l_max as i32) as usize
    }

    /// Index of `mode`, or `None` when `|l| > L`.
    pub fn index_of(&self, mode: Mode) -> Option<usize> {
        (mode.oam.unsigned_abs() as usize <= self.l_max).then(|| Self::index_in(self.l_max, mode))
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude of `mode`, zero outside the truncation.
    pub fn amplitude(&self, mode: Mode) -> C64 {
        self.index_of(mode)
            .map_or(C64::new(0.0, 0.0), |i| self.amps[i])
    }

    /// Basis modes in storage order.
    pub fn modes(&self) -> Vec<Mode> {
        modes_for(self.l_max)
    }

    /// Iterates `(mode, amplitude)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Mode, C64)> + '_ {
        let l = self.l_max as i32;
        Spin::BOTH
            .iter()
            .flat_map(move |&s| (-l..=l).map(move |m| Mode::new(s, m)))
            .zip(self.amps.iter().copied())
    }

    /// `<self|other>`, comparing modes by label so truncations may differ.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.iter()
            .map(|(mode, a)| a.conj() * other.amplitude(mode))
            .sum()
    }

    /// `|<self|other>|`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.inner(other).norm()
    }

    /// Equality up to global phase.
    pub fn approx_eq_up_to_phase(&self, other: &PureState, tol: f64) -> bool {
        (1.0 - self.overlap(other)).abs() <= tol
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Multiplies every amplitude by `phase`, which must have unit modulus.
    pub fn with_global_phase(&self, phase: C64) -> Self {
        PureState {
            l_max: self.l_max,
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    /// Re-expresses the state at truncation `l_max`, which may not drop weight.
    pub fn with_truncation(&self, l_max: usize) -> Result<Self> {
        check_truncation(l_max)?;
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (2 * l_max + 1)];
        for (mode, a) in self.iter() {
            if mode.oam.unsigned_abs() as usize > l_max {
                if a.norm_sqr() > NORM_TOLERANCE {
                    return Err(Error::OamOverflow {
                        oam: mode.oam,
                        shift: 0,
                        l_max,
                    });
                }
                continue;
            }
            amps[Self::index_in(l_max, mode)] = a;
        }
        Ok(PureState { l_max, amps })
    }

    pub(crate) fn from_raw(l_max: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 2 * (2 * l_max + 1));
        PureState { l_max, amps }
    }
}

/// All modes at truncation `l_max`, spin-major.
pub fn modes_for(l_max: usize) -> Vec<Mode> {
    let l = l_max as i32;
    Spin::BOTH
        .iter()
        .flat_map(|&s| (-l..=l).map(move |m| Mode::new(s, m)))
        .collect()
}
