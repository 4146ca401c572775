//! The geometric-phase metasurface as a spin-flipping OAM shifter.
//!
//! The unflipped element maps `|sigma+, l> -> |sigma-, l + dl>` and
//! `|sigma-, l> -> |sigma+, l - dl>` with unit coefficients. Mounting it
//! flipped reverses the sign of both shifts.

use nalgebra::DMatrix;

use crate::quantum::{BasisLabel, DensityMatrix, Mode, PureState, Spin, C64};
use crate::{Error, Result};

/// Measured spin-to-OAM conversion efficiency of the fabricated device.
pub const MEASURED_EFFICIENCY: f64 = 0.72;

/// Amplitudes (or populations) below this are treated as absent when
/// checking truncation overflow.
const NEGLIGIBLE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpmSpec {
    /// Topological charge of the orientation pattern.
    pub winding: i32,
    /// OAM quanta added to the sigma+ branch; equals `winding`.
    pub delta_ell: i32,
    pub flipped: bool,
    /// Fraction of photons converted; the rest pass unchanged.
    pub efficiency: f64,
}

impl GpmSpec {
    pub fn new(winding: i32, flipped: bool, efficiency: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::InvalidParameter(format!(
                "efficiency must lie in [0, 1], got {efficiency}"
            )));
        }
        Ok(GpmSpec {
            winding,
            delta_ell: winding,
            flipped,
            efficiency,
        })
    }

    /// Lossless unit-winding device.
    pub fn ideal(flipped: bool) -> Self {
        GpmSpec::new(1, flipped, 1.0).expect("valid")
    }

    /// Unit winding at the measured efficiency.
    pub fn fabricated(flipped: bool) -> Self {
        GpmSpec::new(1, flipped, MEASURED_EFFICIENCY).expect("valid")
    }

    /// OAM shift applied to a photon entering with `spin`.
    pub fn shift(&self, spin: Spin) -> i32 {
        let dl = if self.flipped {
            -self.delta_ell
        } else {
            self.delta_ell
        };
        match spin {
            Spin::Plus => dl,
            Spin::Minus => -dl,
        }
    }

    /// Image of a single basis mode.
    pub fn map_mode(&self, mode: Mode) -> Mode {
        Mode::new(mode.spin.flipped(), mode.oam + self.shift(mode.spin))
    }
}

/// Applies the lossless metasurface transformation to a pure state.
pub fn gpm_unitary(spec: &GpmSpec, psi: &PureState) -> Result<PureState> {
    let l_max = psi.l_max();
    let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
    for (mode, a) in psi.iter() {
        if a.norm_sqr() <= NEGLIGIBLE * NEGLIGIBLE {
            continue;
        }
        let target = spec.map_mode(mode);
        let idx = psi.index_of(target).ok_or(Error::OamOverflow {
            oam: mode.oam,
            shift: spec.shift(mode.spin),
            l_max,
        })?;
        out[idx] += a;
    }
    Ok(PureState::from_raw(l_max, out))
}

/// `eta U rho U^dagger + (1 - eta) rho`: a converted fraction `eta` and an
/// unconverted remainder that keeps its spin and OAM.
pub fn gpm_channel(spec: &GpmSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n = rho.dim();
    let mut image: Vec<Option<usize>> = Vec::with_capacity(n);
    for (i, label) in rho.labels().iter().enumerate() {
        let mode = label.mode().ok_or(Error::NotProductBasis)?;
        let target = rho.index_of(BasisLabel::Mode(spec.map_mode(mode)));
        if target.is_none() && rho.entry(i, i).re > NEGLIGIBLE {
            let l_max = rho
                .labels()
                .iter()
                .filter_map(|l| l.oam())
                .map(|l| l.unsigned_abs() as usize)
                .max()
                .unwrap_or(0);
            return Err(Error::OamOverflow {
                oam: mode.oam,
                shift: spec.shift(mode.spin),
                l_max,
            });
        }
        image.push(target);
    }

    let eta = spec.efficiency;
    let mut out: DMatrix<C64> = rho.matrix() * C64::new(1.0 - eta, 0.0);
    for (i, ti) in image.iter().enumerate() {
        let Some(ti) = *ti else { continue };
        for (j, tj) in image.iter().enumerate() {
            let Some(tj) = *tj else { continue };
            out[(ti, tj)] += rho.entry(i, j) * eta;
        }
    }
    DensityMatrix::new_hermitian(rho.labels().to_vec(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{OamKet, SpinKet};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn m(spin: Spin, oam: i32) -> Mode {
        Mode::new(spin, oam)
    }

    fn input(pol: SpinKet) -> PureState {
        PureState::tensor(&pol, &OamKet::basis(1, 0).unwrap())
    }

    #[test]
    fn horizontal_input_gives_equal_superposition() {
        let out = gpm_unitary(&GpmSpec::ideal(false), &input(SpinKet::horizontal())).unwrap();
        let a = C64::new(FRAC_1_SQRT_2, 0.0);
        let expected =
            PureState::superposition(1, &[(m(Spin::Minus, 1), a), (m(Spin::Plus, -1), a)]).unwrap();
        assert!(out.approx_eq_up_to_phase(&expected, 1e-12));
    }

    #[test]
    fn vertical_input_matches_written_amplitudes() {
        let out = gpm_unitary(&GpmSpec::ideal(false), &input(SpinKet::vertical())).unwrap();
        let a = C64::new(1.0, 0.0) / (C64::new(2f64.sqrt(), 0.0) * C64::i());
        assert!((out.amplitude(m(Spin::Minus, 1)) - a).norm() < 1e-12);
        assert!((out.amplitude(m(Spin::Plus, -1)) + a).norm() < 1e-12);
    }

    #[test]
    fn sigma_plus_gains_one_quantum() {
        let psi = PureState::basis(1, m(Spin::Plus, 0)).unwrap();
        let out = gpm_unitary(&GpmSpec::ideal(false), &psi).unwrap();
        assert!((out.amplitude(m(Spin::Minus, 1)).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flipped_device_reverses_shift() {
        let out = gpm_unitary(&GpmSpec::ideal(true), &input(SpinKet::horizontal())).unwrap();
        let a = C64::new(FRAC_1_SQRT_2, 0.0);
        let expected =
            PureState::superposition(1, &[(m(Spin::Minus, -1), a), (m(Spin::Plus, 1), a)]).unwrap();
        assert!(out.approx_eq_up_to_phase(&expected, 1e-12));
    }

    #[test]
    fn overflow_is_reported() {
        let psi = PureState::basis(1, m(Spin::Plus, 1)).unwrap();
        assert!(matches!(
            gpm_unitary(&GpmSpec::ideal(false), &psi),
            Err(Error::OamOverflow { .. })
        ));
        let wide = psi.with_truncation(2).unwrap();
        assert!(gpm_unitary(&GpmSpec::ideal(false), &wide).is_ok());
    }

    #[test]
    fn device_is_an_involution() {
        for flipped in [false, true] {
            let spec = GpmSpec::ideal(flipped);
            let psi = PureState::new(
                3,
                (0..14)
                    .map(|k| C64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
                    .collect(),
            )
            .unwrap()
            .with_truncation(3)
            .unwrap();
            // Keep support inside |l| <= 2 so one shift cannot overflow.
            let inner: Vec<(Mode, C64)> = psi.iter().filter(|(md, _)| md.oam.abs() <= 2).collect();
            let psi = PureState::superposition(3, &inner).unwrap();
            let once = gpm_unitary(&spec, &psi).unwrap();
            assert!((once.norm_sqr() - 1.0).abs() < 1e-12);
            let twice = gpm_unitary(&spec, &once).unwrap();
            assert!(twice.approx_eq_up_to_phase(&psi, 1e-12));
        }
    }

    #[test]
    fn channel_limits() {
        let rho = DensityMatrix::from_pure(&input(SpinKet::horizontal()));
        let full = gpm_channel(&GpmSpec::new(1, false, 1.0).unwrap(), &rho).unwrap();
        let unitary = gpm_unitary(&GpmSpec::ideal(false), &input(SpinKet::horizontal())).unwrap();
        let expected = DensityMatrix::from_pure(&unitary);
        assert!((full.matrix() - expected.matrix())
            .iter()
            .all(|z| z.norm() < 1e-15));
        let none = gpm_channel(&GpmSpec::new(1, false, 0.0).unwrap(), &rho).unwrap();
        assert_eq!(none.matrix(), rho.matrix());
    }

    #[test]
    fn efficiency_must_be_a_probability() {
        assert!(GpmSpec::new(1, false, 1.2).is_err());
        assert!(GpmSpec::new(1, false, -0.1).is_err());
    }
}
