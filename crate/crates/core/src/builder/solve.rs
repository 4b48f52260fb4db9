use crate::error::{Error, Result};

use super::chain::{evaluate_chain_with, ChainSettings};
use super::lm::{levenberg_marquardt, LmSettings};
use super::residuals::{boundary_residuals, norm};
use super::scenario::{Scenario, SegmentParams};
use super::solution::TrajectorySolution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub lm: LmSettings,
    /// `chain.max_piece` is further limited by [`piece_limit`].
    pub chain: ChainSettings,
    /// Longest reference arc, rad, of one propagated piece.
    pub max_piece_arc: f64,
    /// Largest thrust-induced drift `a·h²` of one piece, as a fraction of the
    /// start radius.
    pub max_piece_drift: f64,
    /// Worker threads for Jacobian columns; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            lm: LmSettings::default(),
            chain: ChainSettings::default(),
            max_piece_arc: std::f64::consts::FRAC_PI_2,
            max_piece_drift: 5e-4,
            threads: None,
        }
    }
}

/// Longest piece duration, s, meeting the arc and drift limits at the
/// scenario's start radius.
pub fn piece_limit(scenario: &Scenario, settings: &SolverSettings) -> f64 {
    let r = scenario.start.radius();
    let n = (scenario.mu / r.powi(3)).sqrt();
    let by_arc = settings.max_piece_arc / n;
    let by_drift = (settings.max_piece_drift * r / scenario.spacecraft.accel()).sqrt();
    by_arc.min(by_drift)
}

/// Decision-vector scaling: `dt = t_unit·s²`, `k = ν / t_unit`.
#[derive(Debug, Clone, Copy)]
struct Encoding {
    t_unit: f64,
}

impl Encoding {
    fn for_init(scenario: &Scenario, init: &[SegmentParams]) -> Self {
        let mean = init.iter().map(|p| p.dt).sum::<f64>() / init.len() as f64;
        let fallback = scenario.tof_bounds.1 / init.len() as f64;
        let t_unit = [mean, fallback, 1.0].into_iter().find(|v| *v > 0.0).unwrap_or(1.0);
        Self { t_unit }
    }

    fn encode(&self, params: &[SegmentParams]) -> Vec<f64> {
        params
            .iter()
            .flat_map(|p| [(p.dt / self.t_unit).sqrt(), p.alpha0, p.rate * self.t_unit, p.beta])
            .collect()
    }

    fn decode(&self, x: &[f64]) -> Vec<SegmentParams> {
        x.chunks_exact(4)
            .map(|c| SegmentParams::new(self.t_unit * c[0] * c[0], c[1], c[2] / self.t_unit, c[3]))
            .collect()
    }
}

/// Boundary residuals followed by the time-of-flight bound violation.
fn full_residuals(
    scenario: &Scenario,
    params: &[SegmentParams],
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    let c = evaluate_chain_with(scenario, params, &settings.chain)?;
    let mut r = boundary_residuals(scenario, &c.final_state)?;
    r.push(tof_violation(scenario, c.tof(), settings.lm.tol));
    Ok(r)
}

/// Scaled distance of `tof` outside the bounds, which are first narrowed by
/// `tol` so that a residual below `tol` implies the bounds hold exactly.
fn tof_violation(scenario: &Scenario, tof: f64, tol: f64) -> f64 {
    let (lo, hi) = scenario.tof_bounds;
    let scale = hi.max(1.0);
    let margin = (tol * scale).min(0.5 * (hi - lo));
    ((lo + margin - tof).max(0.0) + (tof - hi + margin).max(0.0)) / scale
}

fn resolved(scenario: &Scenario, settings: &SolverSettings) -> SolverSettings {
    let mut s = *settings;
    s.chain.max_piece = s.chain.max_piece.min(piece_limit(scenario, settings));
    s
}

/// Solves for segment controls meeting the scenario's boundary conditions.
///
/// On failure to reach `settings.lm.tol` the best point found is returned
/// inside [`Error::NoConvergence`].
pub fn solve_scenario(
    scenario: &Scenario,
    init: &[SegmentParams],
    settings: &SolverSettings,
) -> Result<TrajectorySolution> {
    scenario.validate()?;
    if init.len() != scenario.segments {
        return Err(Error::InvalidInput(format!(
            "initial guess has {} segments, scenario needs {}",
            init.len(),
            scenario.segments
        )));
    }
    if let Some(p) = init.iter().find(|p| !(p.dt >= 0.0)) {
        return Err(Error::InvalidInput(format!("negative segment duration {}", p.dt)));
    }
    let settings = &resolved(scenario, settings);
    let enc = Encoding::for_init(scenario, init);
    let x0 = enc.encode(init);
    // Surfaces the real error when the starting point cannot be evaluated.
    full_residuals(scenario, &enc.decode(&x0), settings)?;

    let f = |x: &[f64]| full_residuals(scenario, &enc.decode(x), settings).ok();
    let run = || levenberg_marquardt(f, &x0, &settings.lm);
    let report = match settings.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?
            .install(run),
        None => run(),
    }
    .expect("starting point evaluated above");

    let params = enc.decode(&report.x);
    let chain = evaluate_chain_with(scenario, &params, &settings.chain)?;
    let solution = TrajectorySolution::from_chain(
        scenario,
        params,
        chain,
        norm(&report.residuals),
        report.iterations,
        report.converged,
    )?;
    if solution.converged {
        Ok(solution)
    } else {
        Err(Error::NoConvergence(Box::new(solution)))
    }
}

/// Residual-norm history of the accepted solver steps.
pub fn solve_trace(
    scenario: &Scenario,
    init: &[SegmentParams],
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    let settings = &resolved(scenario, settings);
    let enc = Encoding::for_init(scenario, init);
    let x0 = enc.encode(init);
    full_residuals(scenario, &enc.decode(&x0), settings)?;
    let f = |x: &[f64]| full_residuals(scenario, &enc.decode(x), settings).ok();
    Ok(levenberg_marquardt(f, &x0, &settings.lm).expect("evaluated above").trace)
}
