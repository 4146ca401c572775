//! Hermitian matrix helpers built on an eigendecomposition.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{C64, HERMITIAN_TOLERANCE, PSD_TOLERANCE};
use crate::{Error, Result};

/// Largest entrywise `|M - M^dagger|`.
pub fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(m: &DMatrix<C64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let deviation = hermitian_deviation(m);
    if deviation.is_nan() || deviation >= HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    check_hermitian(m)?;
    // Symmetrize so round-off in the upper triangle does not leak in.
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|(v, _)| v)
}

fn rebuild(values: &[f64], vectors: &DMatrix<C64>, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
    let n = vectors.nrows();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        if w == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        for i in 0..n {
            let vi = v[i] * w;
            for j in 0..n {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    out
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
///
/// Eigenvalues in `[-1e-9, 0)` are clamped to zero; anything more negative is
/// rejected.
pub fn matrix_sqrt_psd(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (values, vectors) = hermitian_eigen(m)?;
    if let Some(&min) = values.first() {
        if min < -PSD_TOLERANCE {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
    }
    Ok(rebuild(&values, &vectors, |l| l.max(0.0).sqrt()))
}

/// Sets negative eigenvalues to zero. The trace is not restored.
pub fn clamp_negative_eigenvalues(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (values, vectors) = hermitian_eigen(m)?;
    Ok(rebuild(&values, &vectors, |l| l.max(0.0)))
}
