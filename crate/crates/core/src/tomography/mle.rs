use nalgebra::{DMatrix, Matrix4};

use super::cholesky::CholeskyParams;
use super::cost::CountCost;
use super::linear::linear_inversion;
use super::model::CountsTable;
use super::optimize::{bfgs, nelder_mead};
use super::result::{TomographyMethod, TomographyResult};
use crate::experiment::{block_labels, CountRecord};
use crate::quantum::{DensityMatrix, C64};
use crate::Result;

/// Starting point of the likelihood search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MleInit {
    /// Clamped linear-inversion estimate, mixed slightly toward `I/4`.
    Linear,
    /// The maximally mixed state.
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleOptions {
    /// Budget of cost evaluations across all stages.
    pub max_evals: usize,
    /// Converged once the cost gradient at unit-norm parameters is below this.
    pub gradient_tolerance: f64,
    /// Weight of `I/4` mixed into the linear seed so it has full rank.
    pub seed_mixing: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            max_evals: 100_000,
            gradient_tolerance: 1e-8,
            seed_mixing: 1e-3,
        }
    }
}

fn unit(x: &[f64]) -> Vec<f64> {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / n).collect()
}

fn seed_params(records: &[CountRecord], init: MleInit, mixing: f64) -> CholeskyParams {
    let from_linear = || -> Result<CholeskyParams> {
        let rho = linear_inversion(records)?.rho.clamped()?;
        let m = rho.matrix();
        let mixed = Matrix4::from_fn(|r, c| {
            let id = if r == c { 0.25 } else { 0.0 };
            m[(r, c)] * (1.0 - mixing) + C64::new(id * mixing, 0.0)
        });
        CholeskyParams::from_density(&mixed)
    };
    match init {
        MleInit::Identity => CholeskyParams::identity(),
        // A degenerate linear estimate falls back to the mixed state.
        MleInit::Linear => from_linear().unwrap_or_else(|_| CholeskyParams::identity()),
    }
}

/// Maximum-likelihood reconstruction over physical states.
///
/// Runs BFGS on the analytic gradient from the seed. If that stalls short of
/// a stationary point, simplex descent restarts from the best point found and
/// BFGS polishes again, up to twice. The result never has a higher cost than
/// the seed.
pub fn mle_reconstruct(
    records: &[CountRecord],
    init: MleInit,
    options: &MleOptions,
) -> Result<TomographyResult> {
    let cost = CountCost::new(CountsTable::from_records(records)?);
    let seed = unit(&seed_params(records, init, options.seed_mixing).t);
    let f = |x: &[f64]| cost.value(x);
    let fg = |x: &[f64]| {
        let (v, g) = cost.value_and_gradient(x);
        (v, g.to_vec())
    };
    let grad_at = |x: &[f64]| -> f64 {
        let (_, g) = cost.value_and_gradient(&unit(x));
        g.iter().map(|v| v * v).sum::<f64>().sqrt()
    };

    let seed_value = f(&seed);
    let mut best = seed.clone();
    let mut best_value = seed_value;
    let mut evals = 1usize;
    let mut iterations = 0usize;
    let mut converged = false;

    for round in 0..3 {
        if round > 0 {
            let remaining = options.max_evals.saturating_sub(evals);
            let nm = nelder_mead(f, &best, 0.05, 1e-12, (remaining / 4).min(20_000));
            evals += nm.evaluations;
            iterations += nm.iterations;
            if nm.value < best_value {
                best = unit(&nm.x);
                best_value = nm.value;
            }
        }

        let remaining = options.max_evals.saturating_sub(evals);
        if remaining == 0 {
            break;
        }
        // The gradient scales as 1/|t|, so aim a little below the tolerance.
        let polish = bfgs(fg, &best, 0.5 * options.gradient_tolerance, remaining);
        evals += polish.min.evaluations;
        iterations += polish.min.iterations;
        // BFGS may trade a sliver of value for a flatter point, but never
        // ends above the seed.
        if polish.min.value <= seed_value {
            best = unit(&polish.min.x);
            best_value = f(&best);
        }

        if grad_at(&best) < options.gradient_tolerance {
            converged = true;
            break;
        }
    }

    let params = CholeskyParams {
        t: best.clone().try_into().expect("16 parameters"),
    };
    let m = params.density();
    let rho = DensityMatrix::new(block_labels(), DMatrix::from_fn(4, 4, |r, c| m[(r, c)]))?;
    Ok(TomographyResult {
        rho,
        method: TomographyMethod::Mle,
        physical: true,
        fidelity_vs_target: None,
        nll: Some(best_value),
        iterations: Some(iterations),
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{simulate_counts, BellState, ExperimentConfig, NoiseModel};
    use crate::quantum::{fidelity, trace_distance};

    fn counts(rho: &DensityMatrix, n: f64, noise: NoiseModel, seed: u64) -> Vec<CountRecord> {
        let cfg = ExperimentConfig {
            n_total: n,
            noise,
            seed,
            ..Default::default()
        };
        simulate_counts(rho, &cfg).unwrap()
    }

    #[test]
    fn noiseless_bell_states_match_linear_inversion() {
        for b in BellState::ALL {
            let ideal = b.block_density();
            let records = counts(&ideal, 1e6, NoiseModel::None, 0);
            let mle = mle_reconstruct(&records, MleInit::Linear, &MleOptions::default()).unwrap();
            let lin = linear_inversion(&records).unwrap();
            assert!(mle.converged, "{b}");
            assert!(fidelity(&ideal, &mle.rho).unwrap() >= 0.999);
            assert!(trace_distance(&mle.rho, &lin.rho).unwrap() < 1e-6, "{b}");
            assert!(mle.rho.max_imaginary() < 1e-8);
        }
    }

    #[test]
    fn identity_seed_also_converges() {
        let ideal = BellState::PsiMinus.block_density();
        let records = counts(&ideal, 1000.0, NoiseModel::Poisson, 11);
        let a = mle_reconstruct(&records, MleInit::Identity, &MleOptions::default()).unwrap();
        let b = mle_reconstruct(&records, MleInit::Linear, &MleOptions::default()).unwrap();
        assert!(fidelity(&ideal, &a.rho).unwrap() > 0.9);
        assert!((a.nll.unwrap() - b.nll.unwrap()).abs() < 1e-6 * (1.0 + b.nll.unwrap()));
    }

    #[test]
    fn deterministic() {
        let records = counts(
            &BellState::PhiPlus.block_density(),
            1000.0,
            NoiseModel::Poisson,
            5,
        );
        let a = mle_reconstruct(&records, MleInit::Linear, &MleOptions::default()).unwrap();
        let b = mle_reconstruct(&records, MleInit::Linear, &MleOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cost_never_increases() {
        for seed in 0..10 {
            let records = counts(
                &BellState::PsiPlus.block_density(),
                200.0,
                NoiseModel::Poisson,
                seed,
            );
            let cost = CountCost::new(CountsTable::from_records(&records).unwrap());
            let start = cost.value(&seed_params(&records, MleInit::Linear, 1e-3).t);
            let r = mle_reconstruct(&records, MleInit::Linear, &MleOptions::default()).unwrap();
            assert!(r.nll.unwrap() <= start);
        }
    }

    #[test]
    fn tiny_budget_reports_non_convergence() {
        let records = counts(
            &BellState::PsiPlus.block_density(),
            1000.0,
            NoiseModel::Poisson,
            1,
        );
        let opts = MleOptions {
            max_evals: 40,
            ..Default::default()
        };
        let r = mle_reconstruct(&records, MleInit::Identity, &opts).unwrap();
        assert!(!r.converged);
        assert!(r.rho.is_physical(1e-9));
    }
}
