use crate::error::{Error, Result};
use crate::frames::InertialState;
use crate::vec3;

use super::guess::default_initial_guess;
use super::scenario::{Scenario, ScenarioKind, Target};
use super::solution::TrajectorySolution;
use super::solve::{solve_scenario, SolverSettings};

/// Splits a raising or insertion transfer into `sections` sub-transfers with
/// geometrically spaced intermediate semi-major axes.
///
/// Time-of-flight bounds are shared out in proportion to each section's
/// circular ΔV, and segments in proportion to its tangential-spiral
/// revolutions. Later sections start from a nominal circular state that
/// [`solve_sections`] replaces with the previous section's arrival.
pub fn partition_sections(scenario: &Scenario, sections: usize) -> Result<Vec<Scenario>> {
    if sections == 0 {
        return Err(Error::InvalidInput("section count must be at least 1".into()));
    }
    if sections == 1 {
        return Ok(vec![scenario.clone()]);
    }
    if !matches!(scenario.kind, ScenarioKind::Raising | ScenarioKind::Insertion) {
        return Err(Error::InvalidInput(format!(
            "{} scenarios cannot be sectioned",
            scenario.kind.name()
        )));
    }
    if sections > scenario.segments {
        return Err(Error::InvalidInput(format!(
            "{sections} sections need at least as many segments, got {}",
            scenario.segments
        )));
    }
    let mu = scenario.mu;
    let (r1, r2) = (scenario.start_sma(), scenario.target.sma());
    let radii: Vec<f64> = (0..=sections)
        .map(|i| r1 * (r2 / r1).powf(i as f64 / sections as f64))
        .collect();
    let v: Vec<f64> = radii.iter().map(|r| (mu / r).sqrt()).collect();
    let dv_total = (v[0] - v[sections]).abs();
    let rev_total = (v[0].powi(4) - v[sections].powi(4)).abs();
    let dv_frac: Vec<f64> = (0..sections).map(|i| (v[i] - v[i + 1]).abs() / dv_total).collect();
    let counts = apportion(
        scenario.segments,
        &(0..sections).map(|i| (v[i].powi(4) - v[i + 1].powi(4)).abs() / rev_total).collect::<Vec<_>>(),
    );

    let start_inc = scenario.start_inclination();
    let mut epoch = scenario.start.epoch;
    let mut cumulative = 0.0;
    let mut out = Vec::with_capacity(sections);
    for i in 0..sections {
        cumulative += dv_frac[i];
        let target = match scenario.target {
            _ if i + 1 == sections => scenario.target,
            Target::Orbit(el) => {
                let mut el = el;
                el.sma = radii[i + 1];
                el.inc = start_inc + (el.inc - start_inc) * cumulative;
                Target::Orbit(el)
            }
            _ => Target::Sma(radii[i + 1]),
        };
        let start = if i == 0 {
            scenario.start
        } else {
            circular_in_start_plane(scenario, radii[i], epoch)?
        };
        let (lo, hi) = scenario.tof_bounds;
        let sub = Scenario::new(
            scenario.kind,
            mu,
            start,
            target,
            scenario.spacecraft,
            counts[i],
            (lo * dv_frac[i], hi * dv_frac[i]),
        )?;
        epoch += sub.tof_guess();
        out.push(sub);
    }
    Ok(out)
}

/// Solves the sections of [`partition_sections`] one after another, each
/// starting where the previous one arrived, and joins them.
pub fn solve_sections(
    scenario: &Scenario,
    sections: usize,
    settings: &SolverSettings,
) -> Result<TrajectorySolution> {
    let subs = partition_sections(scenario, sections)?;
    let mut parts: Vec<TrajectorySolution> = Vec::with_capacity(subs.len());
    for (i, sub) in subs.iter().enumerate() {
        let sub = match parts.last() {
            Some(prev) => sub.with_start(prev.final_state()),
            None => sub.clone(),
        };
        let init = default_initial_guess(&sub);
        match solve_scenario(&sub, &init, settings) {
            Ok(sol) => {
                log::debug!("section {}/{}: {} iterations, residual {:.2e}", i + 1, subs.len(), sol.iterations, sol.residual_norm);
                parts.push(sol)
            }
            Err(Error::NoConvergence(best)) => {
                parts.push(*best);
                let joined = TrajectorySolution::concatenate(scenario, parts)?;
                return Err(Error::NoConvergence(Box::new(joined)));
            }
            Err(e) => return Err(e),
        }
    }
    TrajectorySolution::concatenate(scenario, parts)
}

/// Integer shares of `total` proportional to `weights`, each at least one,
/// by largest remainder.
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let k = weights.len();
    let spare = total - k;
    let raw: Vec<f64> = weights.iter().map(|w| w * spare as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut left = spare - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts.iter().map(|c| c + 1).collect()
}

fn circular_in_start_plane(scenario: &Scenario, radius: f64, epoch: f64) -> Result<InertialState<f64>> {
    let s = &scenario.start;
    let radial = vec3::unit(s.pos).expect("validated non-zero radius");
    let normal = vec3::unit(s.angular_momentum())
        .ok_or_else(|| Error::DegenerateOrbit("start state has no orbit plane".into()))?;
    let along = vec3::cross(normal, radial);
    InertialState::new(
        vec3::scale(radius, radial),
        vec3::scale((scenario.mu / radius).sqrt(), along),
        epoch,
    )
}
