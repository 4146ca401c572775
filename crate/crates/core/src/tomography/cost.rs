use nalgebra::Vector4;

use super::cholesky::{lower_from, OFF_DIAGONAL};
use super::model::CountsTable;
use crate::quantum::C64;

/// Floor on predicted counts in the cost denominator, keeping empty bins finite.
pub const COUNT_FLOOR: f64 = 0.5;

/// Gaussian approximation to the Poisson negative log-likelihood,
/// `sum_k (N p_k(t) - n_k)^2 / (2 max(N p_k(t), 0.5))` with `N = n_ref`.
#[derive(Clone, Debug)]
pub struct CountCost {
    table: CountsTable,
}

struct Term {
    /// `T phi_k`.
    image: Vector4<C64>,
    /// `|T phi_k|^2`.
    weight: f64,
}

impl CountCost {
    pub fn new(table: CountsTable) -> Self {
        CountCost { table }
    }

    pub fn table(&self) -> &CountsTable {
        &self.table
    }

    fn terms<'a>(&'a self, t: &'a [f64]) -> impl Iterator<Item = (usize, Term)> + 'a {
        let lower = lower_from(t);
        self.table.kets.iter().enumerate().map(move |(k, phi)| {
            let image = lower * phi;
            let weight = image.norm_squared();
            (k, Term { image, weight })
        })
    }

    fn bin(&self, predicted: f64, observed: f64) -> f64 {
        let r = predicted - observed;
        r * r / (2.0 * predicted.max(COUNT_FLOOR))
    }

    /// Derivative of [`Self::bin`] with respect to the predicted count.
    fn bin_slope(&self, x: f64, n: f64) -> f64 {
        if x > COUNT_FLOOR {
            (x * x - n * n) / (2.0 * x * x)
        } else {
            (x - n) / COUNT_FLOOR
        }
    }

    pub fn value(&self, t: &[f64]) -> f64 {
        let norm: f64 = t.iter().map(|x| x * x).sum();
        if !(norm > 0.0) {
            return f64::INFINITY;
        }
        let m = self.table.n_ref;
        self.terms(t)
            .map(|(k, term)| self.bin(m * term.weight / norm, self.table.counts[k]))
            .sum()
    }

    /// Cost and its analytic gradient.
    pub fn value_and_gradient(&self, t: &[f64]) -> (f64, [f64; 16]) {
        let norm: f64 = t.iter().map(|x| x * x).sum();
        let mut grad = [0.0; 16];
        if !(norm > 0.0) {
            return (f64::INFINITY, grad);
        }
        let m = self.table.n_ref;
        let mut value = 0.0;
        for (k, term) in self.terms(t) {
            let n = self.table.counts[k];
            let x = m * term.weight / norm;
            value += self.bin(x, n);
            // dx/dt_j = m (dq/dt_j * norm - q * 2 t_j) / norm^2
            let slope = self.bin_slope(x, n) * m / norm;
            let phi = &self.table.kets[k];
            let v = &term.image;
            let q_over_norm = term.weight / norm;
            for i in 0..4 {
                let dq = 2.0 * (v[i].conj() * phi[i]).re;
                grad[i] += slope * (dq - 2.0 * t[i] * q_over_norm);
            }
            for (j, &(r, c)) in OFF_DIAGONAL.iter().enumerate() {
                let z = v[r].conj() * phi[c];
                let (a, b) = (4 + 2 * j, 5 + 2 * j);
                grad[a] += slope * (2.0 * z.re - 2.0 * t[a] * q_over_norm);
                // d/d(im) multiplies phi_c by i: Re(conj(v_r) i phi_c) = -Im(z).
                grad[b] += slope * (-2.0 * z.im - 2.0 * t[b] * q_over_norm);
            }
        }
        (value, grad)
    }
}
