use nalgebra::{Cholesky, Matrix4};

use crate::quantum::C64;
use crate::{Error, Result};

/// Strictly-lower entries `(row, col)` of `T`, in parameter order.
pub(crate) const OFF_DIAGONAL: [(usize, usize); 6] =
    [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];

/// Sixteen reals defining a lower-triangular `T` with real diagonal; the
/// state is `rho = T^dagger T / Tr(T^dagger T)`, physical for any `t != 0`.
///
/// `t[0..4]` is the diagonal; `t[4 + 2k]` and `t[5 + 2k]` are the real and
/// imaginary parts of the `k`-th entry of `OFF_DIAGONAL`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CholeskyParams {
    pub t: [f64; 16],
}

impl CholeskyParams {
    pub fn identity() -> Self {
        let mut t = [0.0; 16];
        t[..4].fill(1.0);
        CholeskyParams { t }
    }

    pub fn lower(&self) -> Matrix4<C64> {
        lower_from(&self.t)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.t.iter().map(|x| x * x).sum()
    }

    /// `T^dagger T / Tr(T^dagger T)`.
    pub fn density(&self) -> Matrix4<C64> {
        let t = self.lower();
        t.adjoint() * t / C64::new(self.norm_sqr(), 0.0)
    }

    /// Inverts [`CholeskyParams::density`] for a positive-definite `rho`.
    ///
    /// With `J` the exchange matrix, `J rho J = L L^dagger` (ordinary
    /// Cholesky), and `T = J L^dagger J` is lower triangular with
    /// `T^dagger T = rho`.
    pub fn from_density(rho: &Matrix4<C64>) -> Result<Self> {
        let flipped = Matrix4::from_fn(|r, c| rho[(3 - r, 3 - c)]);
        let chol = Cholesky::new(flipped).ok_or(Error::NotPositive {
            min_eigenvalue: 0.0,
        })?;
        let l = chol.l();
        let t = Matrix4::from_fn(|r, c| l[(3 - c, 3 - r)].conj());
        let mut p = [0.0; 16];
        for i in 0..4 {
            p[i] = t[(i, i)].re;
        }
        for (k, &(r, c)) in OFF_DIAGONAL.iter().enumerate() {
            p[4 + 2 * k] = t[(r, c)].re;
            p[5 + 2 * k] = t[(r, c)].im;
        }
        Ok(CholeskyParams { t: p })
    }
}

pub(crate) fn lower_from(t: &[f64]) -> Matrix4<C64> {
    let mut m = Matrix4::<C64>::zeros();
    for i in 0..4 {
        m[(i, i)] = C64::new(t[i], 0.0);
    }
    for (k, &(r, c)) in OFF_DIAGONAL.iter().enumerate() {
        m[(r, c)] = C64::new(t[4 + 2 * k], t[5 + 2 * k]);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_err(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_params_give_maximally_mixed() {
        let rho = CholeskyParams::identity().density();
        assert!(max_err(&rho, &(Matrix4::identity() * C64::new(0.25, 0.0))) < 1e-15);
    }

    proptest! {
        #[test]
        fn density_is_physical(t in prop::array::uniform16(-2.0f64..2.0)) {
            prop_assume!(t.iter().map(|x| x * x).sum::<f64>() > 1e-6);
            let rho = CholeskyParams { t }.density();
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(max_err(&rho, &rho.adjoint()) < 1e-14);
            let eig = nalgebra::SymmetricEigen::new(rho).eigenvalues;
            prop_assert!(eig.iter().all(|&l| l > -1e-12));
        }

        #[test]
        fn from_density_inverts(t in prop::array::uniform16(-2.0f64..2.0)) {
            let mut t = t;
            // Keep T well conditioned so rho is positive definite.
            for d in t.iter_mut().take(4) {
                *d = d.abs() + 0.5;
            }
            let rho = CholeskyParams { t }.density();
            let back = CholeskyParams::from_density(&rho).unwrap();
            prop_assert!(max_err(&back.density(), &rho) < 1e-10);
        }

        #[test]
        fn sign_gauge(t in prop::array::uniform16(-2.0f64..2.0)) {
            prop_assume!(t.iter().map(|x| x * x).sum::<f64>() > 1e-6);
            let neg = CholeskyParams { t: t.map(|x| -x) };
            prop_assert_eq!(CholeskyParams { t }.density(), neg.density());
        }
    }
}
