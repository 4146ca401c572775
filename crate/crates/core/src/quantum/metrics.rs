use nalgebra::DMatrix;

use super::linalg::{hermitian_eigenvalues, matrix_sqrt_psd};
use super::{BasisLabel, DensityMatrix, Mode, PureState, Spin, C64, PSD_TOLERANCE};
use crate::{Error, Result};

/// Factor of the spin x OAM product space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    Spin,
    Oam,
}

fn check_same_basis(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.labels() != b.labels() {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

fn check_psd(rho: &DensityMatrix) -> Result<()> {
    let min = rho.min_eigenvalue();
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// Root fidelity `F(rho, sigma) = Tr sqrt(sqrt(sigma) rho sqrt(sigma))`.
///
/// This is the unsquared form; for a pure `rho = |psi><psi|` it reduces to
/// `sqrt(<psi|sigma|psi>)`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_basis(rho, sigma)?;
    check_psd(rho)?;
    check_psd(sigma)?;
    let root = matrix_sqrt_psd(sigma.matrix())?;
    let inner = &root * rho.matrix() * &root;
    let inner = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
    let values = hermitian_eigenvalues(&inner)?;
    // Eigenvalues at round-off level would otherwise add ~1e-8 each after the root.
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    let floor = 4.0 * values.len() as f64 * f64::EPSILON * top;
    let f: f64 = values
        .into_iter()
        .filter(|&l| l > floor)
        .map(f64::sqrt)
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Trace distance `||a - b||_1 / 2`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_basis(a, b)?;
    let diff = a.matrix() - b.matrix();
    Ok(0.5
        * hermitian_eigenvalues(&diff)?
            .iter()
            .map(|l| l.abs())
            .sum::<f64>())
}

/// Splits the labels of a joint state into its spin and OAM factors.
fn product_factors(rho: &DensityMatrix) -> Result<(Vec<Spin>, Vec<i32>)> {
    let modes: Vec<Mode> = rho
        .labels()
        .iter()
        .map(|l| l.mode().ok_or(Error::NotProductBasis))
        .collect::<Result<_>>()?;
    let mut spins: Vec<Spin> = Vec::new();
    let mut oams: Vec<i32> = Vec::new();
    for m in &modes {
        if !spins.contains(&m.spin) {
            spins.push(m.spin);
        }
        if !oams.contains(&m.oam) {
            oams.push(m.oam);
        }
    }
    let expected = spins
        .iter()
        .flat_map(|&s| oams.iter().map(move |&l| Mode::new(s, l)));
    if spins.len() * oams.len() != modes.len() || !expected.eq(modes.iter().copied()) {
        return Err(Error::NotProductBasis);
    }
    Ok((spins, oams))
}

/// Traces out `subsystem`, leaving a density matrix on the other factor.
pub fn partial_trace(rho: &DensityMatrix, subsystem: Subsystem) -> Result<DensityMatrix> {
    let (spins, oams) = product_factors(rho)?;
    let (ns, no) = (spins.len(), oams.len());
    let m = rho.matrix();
    let (labels, mat) = match subsystem {
        Subsystem::Oam => {
            let mat = DMatrix::from_fn(ns, ns, |a, b| {
                (0..no).map(|k| m[(a * no + k, b * no + k)]).sum::<C64>()
            });
            (spins.into_iter().map(BasisLabel::Spin).collect(), mat)
        }
        Subsystem::Spin => {
            let mat = DMatrix::from_fn(no, no, |a, b| {
                (0..ns).map(|k| m[(k * no + a, k * no + b)]).sum::<C64>()
            });
            (oams.into_iter().map(BasisLabel::Oam).collect(), mat)
        }
    };
    DensityMatrix::new_hermitian(labels, mat)
}

const BLOCK_SUPPORT_TOLERANCE: f64 = 1e-9;

/// Entanglement entropy (bits) between spin and OAM for a state supported on
/// `l in {-1, +1}`: the von Neumann entropy of its spin marginal.
pub fn entanglement_entropy(psi: &PureState) -> Result<f64> {
    let outside: f64 = psi
        .iter()
        .filter(|(m, _)| m.oam.abs() != 1)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if outside > BLOCK_SUPPORT_TOLERANCE {
        return Err(Error::SupportOutsideBlock { weight: outside });
    }
    let amp = |s: Spin, l: i32| psi.amplitude(Mode::new(s, l));
    let mut marginal = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, &s) in Spin::BOTH.iter().enumerate() {
        for (j, &t) in Spin::BOTH.iter().enumerate() {
            marginal[i][j] = [-1, 1].iter().map(|&l| amp(s, l) * amp(t, l).conj()).sum();
        }
    }
    let trace = marginal[0][0].re + marginal[1][1].re;
    let half_gap =
        (0.25 * (marginal[0][0].re - marginal[1][1].re).powi(2) + marginal[0][1].norm_sqr()).sqrt();
    let entropy: f64 = [0.5 * trace + half_gap, 0.5 * trace - half_gap]
        .iter()
        .map(|&l| l / trace)
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum();
    Ok(entropy.clamp(0.0, 1.0))
}

/// Expectation values `(<sigma>, <l>)` in units of hbar.
pub fn angular_momentum_expectations(psi: &PureState) -> (f64, f64) {
    psi.iter().fold((0.0, 0.0), |(s, l), (mode, a)| {
        let p = a.norm_sqr();
        (s + p * mode.spin.sign() as f64, l + p * mode.oam as f64)
    })
}
