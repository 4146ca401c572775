use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};

use super::model::CountsTable;
use super::result::{TomographyMethod, TomographyResult};
use crate::experiment::{block_labels, CountRecord};
use crate::quantum::{DensityMatrix, C64};
use crate::{Error, Result};

/// Minimum eigenvalue below which a linear estimate is flagged non-physical.
pub const NON_PHYSICAL_TOLERANCE: f64 = 1e-6;

fn pauli(k: usize) -> Matrix2<C64> {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::i());
    match k {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -i, i, o),
        _ => Matrix2::new(l, o, o, -l),
    }
}

/// `sigma_a (x) sigma_b` on the block, whose index is `2 * spin + oam`.
fn product_basis() -> Vec<Matrix4<C64>> {
    let mut out = Vec::with_capacity(16);
    for a in 0..4 {
        for b in 0..4 {
            let (pa, pb) = (pauli(a), pauli(b));
            out.push(Matrix4::from_fn(|r, c| {
                pa[(r / 2, c / 2)] * pb[(r % 2, c % 2)]
            }));
        }
    }
    out
}

/// Solves `<phi_k| rho |phi_k> = n_k / n_ref` for Hermitian `rho` expanded in
/// the 16 Pauli products, then rescales to unit trace.
pub fn linear_inversion(records: &[CountRecord]) -> Result<TomographyResult> {
    let table = CountsTable::from_records(records)?;
    let basis = product_basis();
    let system = DMatrix::from_fn(16, 16, |k, j| {
        let phi = &table.kets[k];
        (phi.adjoint() * basis[j] * phi)[(0, 0)].re / 4.0
    });
    let rhs = DVector::from_row_slice(&table.frequencies());
    let coeffs = system.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let mut rho = Matrix4::<C64>::zeros();
    for (b, c) in basis.iter().zip(coeffs.iter()) {
        rho += b * C64::new(c / 4.0, 0.0);
    }
    let trace = rho.trace().re;
    if !(trace > 0.0) {
        return Err(Error::TraceNotUnit { trace });
    }
    rho /= C64::new(trace, 0.0);
    // Pauli products are exactly Hermitian; remove round-off asymmetry.
    let rho = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let rho =
        DensityMatrix::new_hermitian(block_labels(), DMatrix::from_fn(4, 4, |r, c| rho[(r, c)]))?;
    let physical = rho.is_physical(NON_PHYSICAL_TOLERANCE);
    Ok(TomographyResult {
        rho,
        method: TomographyMethod::Linear,
        physical,
        fidelity_vs_target: None,
        nll: None,
        iterations: None,
        converged: true,
    })
}
