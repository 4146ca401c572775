//! Small dense minimizers: Nelder-Mead simplex and BFGS.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Nelder-Mead with the dimension-adaptive coefficients of Gao and Han.
///
/// Stops when the spread of simplex values drops below
/// `ftol * (|f_best| + ftol)` or after `max_evals` evaluations.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, ftol: f64, max_evals: usize) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        let h = if x[i].abs() > 1e-8 {
            step * x[i].abs()
        } else {
            step
        };
        x[i] += h;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= ftol * (best.abs() + ftol) {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let towards = |coef: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = towards(alpha, &simplex[n].0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = towards(alpha * beta, &simplex[n].0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        // Contraction, outside if the reflection improved on the worst point.
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = towards(alpha * gamma, &simplex[n].0);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = towards(-gamma, &simplex[n].0);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = anchor
                .iter()
                .zip(&vertex.0)
                .map(|(a, v)| a + delta * (v - a))
                .collect();
            let v = eval(&x, &mut evals);
            *vertex = (x, v);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        iterations,
        evaluations: evals,
    }
}

#[derive(Clone, Debug)]
pub struct GradientMinimum {
    pub min: Minimum,
    pub gradient_norm: f64,
}

/// BFGS with an Armijo backtracking line search.
///
/// Stops when the gradient norm falls below `gtol`, when no descent step can
/// be found, or after `max_evals` evaluations. The returned point may carry a
/// value up to 1e-12 (relative) above the best seen if that shrinks the gradient.
pub fn bfgs<F>(mut fg: F, x0: &[f64], gtol: f64, max_evals: usize) -> GradientMinimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let (mut fx, g) = fg(x.as_slice());
    let mut g = DVector::from_vec(g);
    let mut evals = 1usize;
    let mut iterations = 0usize;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut reset_pending = false;

    while evals < max_evals && g.norm() >= gtol && fx.is_finite() {
        let mut dir = -(&h * &g);
        let mut slope = g.dot(&dir);
        if !(slope < 0.0) {
            h = DMatrix::identity(n, n);
            dir = -g.clone();
            slope = -g.norm_squared();
        }
        // First step from the identity metric is scaled to a unit move.
        let mut step = if iterations == 0 || reset_pending {
            (1.0 / dir.norm()).min(1.0)
        } else {
            1.0
        };
        reset_pending = false;

        let mut accepted = None;
        while evals < max_evals {
            let xn = &x + &dir * step;
            let (fnew, gnew) = fg(xn.as_slice());
            evals += 1;
            let gnew = DVector::from_vec(gnew);
            let armijo = fnew <= fx + 1e-4 * step * slope;
            // Near the minimum the decrease drowns in round-off; a smaller
            // gradient at an equal value still counts as progress.
            let flat = fnew <= fx + 1e-12 * (1.0 + fx.abs()) && gnew.norm() < g.norm();
            if fnew.is_finite() && (armijo || flat) {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            step *= 0.5;
            if step * dir.norm() < 1e-16 * (1.0 + x.norm()) {
                break;
            }
        }
        let Some((xn, fnew, gnew)) = accepted else {
            if h != DMatrix::identity(n, n) {
                // Retry once along steepest descent before giving up.
                h = DMatrix::identity(n, n);
                reset_pending = true;
                continue;
            }
            break;
        };
        iterations += 1;

        let s = &xn - &x;
        let y = &gnew - &g;
        let sy = s.dot(&y);
        if sy > 1e-300 {
            if iterations == 1 {
                // Shanno's scaling of the initial inverse Hessian.
                h *= sy / y.norm_squared();
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            h += (&s * s.transpose()) * (rho * rho * yhy + rho)
                - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        x = xn;
        fx = fnew;
        g = gnew;
    }

    GradientMinimum {
        gradient_norm: g.norm(),
        min: Minimum {
            x: x.as_slice().to_vec(),
            value: fx,
            iterations,
            evaluations: evals,
        },
    }
}
