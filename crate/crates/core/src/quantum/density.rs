use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::linalg::{clamp_negative_eigenvalues, hermitian_deviation, hermitian_eigenvalues};
use super::{Mode, PureState, Spin, C64, HERMITIAN_TOLERANCE, PSD_TOLERANCE, TRACE_TOLERANCE};
use crate::{Error, Result};

/// Label of one basis vector of a density matrix.
///
/// Joint states use [`BasisLabel::Mode`]; reduced states left by a partial
/// trace carry only the surviving factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    Mode(Mode),
    Spin(Spin),
    Oam(i32),
}

impl BasisLabel {
    pub fn spin(&self) -> Option<Spin> {
        match *self {
            BasisLabel::Mode(m) => Some(m.spin),
            BasisLabel::Spin(s) => Some(s),
            BasisLabel::Oam(_) => None,
        }
    }

    pub fn oam(&self) -> Option<i32> {
        match *self {
            BasisLabel::Mode(m) => Some(m.oam),
            BasisLabel::Spin(_) => None,
            BasisLabel::Oam(l) => Some(l),
        }
    }

    pub fn mode(&self) -> Option<Mode> {
        match *self {
            BasisLabel::Mode(m) => Some(m),
            _ => None,
        }
    }
}

impl From<Mode> for BasisLabel {
    fn from(m: Mode) -> Self {
        BasisLabel::Mode(m)
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Mode(m) => write!(f, "{m}"),
            BasisLabel::Spin(s) => write!(f, "|{s}⟩"),
            BasisLabel::Oam(l) => write!(f, "|ℓ={l}⟩"),
        }
    }
}

// Serialized as `[spin, l]` with `null` for a traced-out factor.
impl Serialize for BasisLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.spin().map(Spin::sign), self.oam()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BasisLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let (spin, oam) = <(Option<i32>, Option<i32>)>::deserialize(d)?;
        let spin = spin
            .map(Spin::from_sign)
            .transpose()
            .map_err(D::Error::custom)?;
        match (spin, oam) {
            (Some(s), Some(l)) => Ok(BasisLabel::Mode(Mode::new(s, l))),
            (Some(s), None) => Ok(BasisLabel::Spin(s)),
            (None, Some(l)) => Ok(BasisLabel::Oam(l)),
            (None, None) => Err(D::Error::custom("basis label needs a spin or an OAM index")),
        }
    }
}

/// Hermitian, unit-trace operator with labelled basis.
///
/// Instances built with [`DensityMatrix::new`] are also positive semidefinite.
/// [`DensityMatrix::new_hermitian`] admits small negative eigenvalues, which
/// linear-inversion tomography can produce; [`DensityMatrix::is_physical`]
/// reports them and [`DensityMatrix::clamped`] removes them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "DensityMatrixJson", try_from = "DensityMatrixJson")]
pub struct DensityMatrix {
    labels: Vec<BasisLabel>,
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validated physical density matrix.
    pub fn new(labels: Vec<BasisLabel>, mat: DMatrix<C64>) -> Result<Self> {
        let rho = Self::new_hermitian(labels, mat)?;
        let min = rho.min_eigenvalue();
        if min < -PSD_TOLERANCE {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(rho)
    }

    /// Hermitian unit-trace matrix that may have negative eigenvalues.
    pub fn new_hermitian(labels: Vec<BasisLabel>, mat: DMatrix<C64>) -> Result<Self> {
        if !mat.is_square() || mat.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: mat.nrows(),
            });
        }
        let deviation = hermitian_deviation(&mat);
        if deviation.is_nan() || deviation >= HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = mat.trace().re;
        if (trace - 1.0).abs() >= TRACE_TOLERANCE {
            return Err(Error::TraceNotUnit { trace });
        }
        Ok(DensityMatrix { labels, mat })
    }

    /// `|psi><psi|` over all modes of the state's truncation.
    pub fn from_pure(psi: &PureState) -> Self {
        let labels = psi.modes().into_iter().map(BasisLabel::Mode).collect();
        DensityMatrix {
            labels,
            mat: outer(psi.amplitudes()),
        }
    }

    /// `|psi><psi|` for a ket given in the basis `labels`, normalized first.
    pub fn from_ket(labels: Vec<BasisLabel>, amps: &[C64]) -> Result<Self> {
        if amps.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-300) {
            return Err(Error::ZeroNorm);
        }
        let v: Vec<C64> = amps.iter().map(|a| a / norm).collect();
        Ok(DensityMatrix {
            labels,
            mat: outer(&v),
        })
    }

    /// `|psi><psi|` restricted to `modes`, renormalized.
    pub fn from_pure_on(psi: &PureState, modes: &[Mode]) -> Result<Self> {
        let amps: Vec<C64> = modes.iter().map(|&m| psi.amplitude(m)).collect();
        Self::from_ket(modes.iter().copied().map(BasisLabel::Mode).collect(), &amps)
    }

    pub fn maximally_mixed(labels: Vec<BasisLabel>) -> Self {
        let n = labels.len();
        let mat = DMatrix::<C64>::identity(n, n) * C64::new(1.0 / n as f64, 0.0);
        DensityMatrix { labels, mat }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat).expect("density matrices are Hermitian")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// True when no eigenvalue is below `-tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Negative eigenvalues set to zero, then renormalized to unit trace.
    pub fn clamped(&self) -> Result<Self> {
        let m = clamp_negative_eigenvalues(&self.mat)?;
        let trace = m.trace().re;
        if !(trace > 0.0) {
            return Err(Error::TraceNotUnit { trace });
        }
        DensityMatrix::new(self.labels.clone(), m / C64::new(trace, 0.0))
    }

    /// `<psi|rho|psi>` for a ket in this matrix's basis.
    pub fn expectation(&self, amps: &[C64]) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            if amps[i] == C64::new(0.0, 0.0) {
                continue;
            }
            let row: C64 = amps
                .iter()
                .enumerate()
                .map(|(j, a)| self.mat[(i, j)] * a)
                .sum();
            acc += amps[i].conj() * row;
        }
        acc
    }

    /// Population of the listed labels.
    pub fn weight_on(&self, labels: &[BasisLabel]) -> f64 {
        labels
            .iter()
            .filter_map(|&l| self.index_of(l))
            .map(|i| self.mat[(i, i)].re)
            .sum()
    }

    /// Projects onto the subspace spanned by `labels` and renormalizes.
    ///
    /// Returns the conditional state and the probability of landing in the
    /// subspace.
    pub fn post_select(&self, labels: &[BasisLabel]) -> Result<(DensityMatrix, f64)> {
        let idx: Vec<usize> = labels
            .iter()
            .map(|&l| self.index_of(l).ok_or(Error::BasisMismatch))
            .collect::<Result<_>>()?;
        let n = idx.len();
        let sub = DMatrix::from_fn(n, n, |i, j| self.mat[(idx[i], idx[j])]);
        let weight = sub.trace().re;
        if !(weight > 1e-300) {
            return Err(Error::ZeroNorm);
        }
        let rho = DensityMatrix::new(labels.to_vec(), sub / C64::new(weight, 0.0))?;
        Ok((rho, weight))
    }

    /// Largest `|Im rho_ij|`.
    pub fn max_imaginary(&self) -> f64 {
        self.mat.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        DensityMatrix::from_pure(psi)
    }
}

fn outer(v: &[C64]) -> DMatrix<C64> {
    let n = v.len();
    DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

#[derive(Serialize, Deserialize)]
struct DensityMatrixJson {
    dim: usize,
    basis_labels: Vec<BasisLabel>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<DensityMatrix> for DensityMatrixJson {
    fn from(rho: DensityMatrix) -> Self {
        let n = rho.dim();
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| f(&rho.mat[(i, j)])).collect())
                .collect()
        };
        DensityMatrixJson {
            dim: n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
            basis_labels: rho.labels,
        }
    }
}

impl TryFrom<DensityMatrixJson> for DensityMatrix {
    type Error = Error;

    fn try_from(j: DensityMatrixJson) -> Result<Self> {
        let n = j.dim;
        let shape_ok = j.basis_labels.len() == n
            && j.re.len() == n
            && j.im.len() == n
            && j.re.iter().chain(&j.im).all(|r| r.len() == n);
        if !shape_ok {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: j.basis_labels.len(),
            });
        }
        let mat = DMatrix::from_fn(n, n, |r, c| C64::new(j.re[r][c], j.im[r][c]));
        DensityMatrix::new_hermitian(j.basis_labels, mat)
    }
}
