//! Levenberg-Marquardt with central finite-difference Jacobians.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::residuals::norm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmSettings {
    pub tol: f64,
    pub max_iterations: usize,
    pub fd_relative: f64,
    pub fd_floor: f64,
    pub initial_damping: f64,
    /// Consecutive rejected trial steps tolerated before giving up.
    pub max_rejections: usize,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iterations: 200,
            fd_relative: 1e-7,
            fd_floor: 1e-10,
            initial_damping: 1e-3,
            max_rejections: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual norm after each accepted step, starting with the initial one.
    pub trace: Vec<f64>,
}

/// Minimizes `|f(x)|` starting from `x0`. `f` returns `None` where it cannot
/// be evaluated; such trial points are rejected.
///
/// Returns `None` only when `f(x0)` itself fails.
pub fn levenberg_marquardt<F>(f: F, x0: &[f64], settings: &LmSettings) -> Option<LmReport>
where
    F: Fn(&[f64]) -> Option<Vec<f64>> + Sync,
{
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let mut rn = norm(&r);
    let mut trace = vec![rn];
    let mut lambda = settings.initial_damping;
    let mut iterations = 0;

    while rn > settings.tol && iterations < settings.max_iterations {
        iterations += 1;
        let jac = jacobian(&f, &x, &r, settings);
        let rv = DVector::from_column_slice(&r);
        let mut accepted = false;
        for _ in 0..settings.max_rejections {
            let Some(delta) = damped_step(&jac, &rv, lambda) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            match f(&trial) {
                Some(rt) if norm(&rt) < rn => {
                    x = trial;
                    rn = norm(&rt);
                    r = rt;
                    lambda = (lambda / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
                _ => lambda *= 4.0,
            }
        }
        if !accepted {
            break;
        }
        trace.push(rn);
    }
    Some(LmReport {
        x,
        residuals: r,
        residual_norm: rn,
        iterations,
        converged: rn <= settings.tol,
        trace,
    })
}

fn jacobian<F>(f: &F, x: &[f64], r0: &[f64], settings: &LmSettings) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Option<Vec<f64>> + Sync,
{
    let columns: Vec<Vec<f64>> = (0..x.len())
        .into_par_iter()
        .map(|j| {
            let h = (settings.fd_relative * x[j].abs()).max(settings.fd_floor);
            let mut xp = x.to_vec();
            xp[j] = x[j] + h;
            let fp = f(&xp);
            xp[j] = x[j] - h;
            let fm = f(&xp);
            match (fp, fm) {
                (Some(p), Some(m)) => p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect(),
                (Some(p), None) => p.iter().zip(r0).map(|(a, b)| (a - b) / h).collect(),
                (None, Some(m)) => r0.iter().zip(&m).map(|(a, b)| (a - b) / h).collect(),
                (None, None) => vec![0.0; r0.len()],
            }
        })
        .collect();
    DMatrix::from_fn(r0.len(), x.len(), |i, j| columns[j][i])
}

/// Damped Gauss-Newton step. Underdetermined systems use the dual form so the
/// linear solve is only as large as the residual vector.
fn damped_step(jac: &DMatrix<f64>, r: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    let (m, n) = jac.shape();
    if m < n {
        let mut a = jac * jac.transpose();
        let scale = mean_diagonal(&a);
        for i in 0..m {
            a[(i, i)] += lambda * scale;
        }
        let y = a.cholesky()?.solve(r);
        Some(-(jac.transpose() * y))
    } else {
        let mut a = jac.transpose() * jac;
        let scale = mean_diagonal(&a);
        for i in 0..n {
            a[(i, i)] += lambda * scale;
        }
        let g = jac.transpose() * r;
        Some(-a.cholesky()?.solve(&g))
    }
}

fn mean_diagonal(a: &DMatrix<f64>) -> f64 {
    let d = a.diagonal();
    let mean = d.sum() / d.len().max(1) as f64;
    if mean > 0.0 {
        mean
    } else {
        1.0
    }
}
