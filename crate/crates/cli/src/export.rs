//! Control histories, trajectory samples and optimizer seeds.

use std::fs::{self, File};
use std::path::Path;

use serde::{Deserialize, Serialize};

use cw_seed::builder::{local_direction, ControlSpan, TrajectorySolution};
use cw_seed::hill::ControlLaw;
use cw_seed::vec3;

use crate::error::CliError;

pub const DEFAULT_CONTROL_SAMPLES: usize = 10;
pub const DEFAULT_SEED_STEPS_PER_REV: usize = 10;
pub const MIN_TRAJECTORY_ROWS: usize = 1000;
pub const TRAJECTORY_ROWS_PER_REV: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlRow {
    pub t_s: f64,
    pub alpha_rad: f64,
    pub beta_rad: f64,
    pub k_rad_per_s: f64,
    pub accel_km_s2: f64,
    pub segment_index: usize,
}

/// `samples` rows per segment at uniform offsets, then one row at the end of
/// the last segment. Angles are not wrapped.
pub fn control_history(solution: &TrajectorySolution, samples: usize) -> Vec<ControlRow> {
    let accel = solution.scenario.spacecraft.accel();
    let samples = samples.max(1);
    let mut rows = Vec::with_capacity(solution.params.len() * samples + 1);
    let mut t0 = solution.start_epoch();
    let row = |t0: f64, tau: f64, i: usize| {
        let p = solution.params[i];
        ControlRow {
            t_s: t0 + tau,
            alpha_rad: p.alpha0 + p.rate * tau,
            beta_rad: p.beta,
            k_rad_per_s: p.rate,
            accel_km_s2: accel,
            segment_index: i,
        }
    };
    for (i, p) in solution.params.iter().enumerate() {
        for j in 0..samples {
            rows.push(row(t0, p.dt * j as f64 / samples as f64, i));
        }
        if i + 1 == solution.params.len() {
            rows.push(row(t0, p.dt, i));
        }
        t0 += p.dt;
    }
    rows
}

/// Rebuilds per-segment steering from a control history.
pub fn spans_from_rows(rows: &[ControlRow]) -> Result<Vec<ControlSpan>, String> {
    let Some(last) = rows.last() else {
        return Err("no rows".into());
    };
    if rows.windows(2).any(|w| w[1].t_s < w[0].t_s) {
        return Err("times must be nondecreasing".into());
    }
    let mut firsts: Vec<&ControlRow> = Vec::new();
    for r in rows {
        match firsts.last() {
            Some(f) if f.segment_index == r.segment_index => {}
            Some(f) if r.segment_index != f.segment_index + 1 => {
                return Err(format!("segment {} follows segment {}", r.segment_index, f.segment_index));
            }
            None if r.segment_index != 0 => return Err("first row must belong to segment 0".into()),
            _ => firsts.push(r),
        }
    }
    firsts
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let end = firsts.get(i + 1).map_or(last.t_s, |n| n.t_s);
            let law = ControlLaw::new(f.accel_km_s2, f.alpha_rad, f.k_rad_per_s, f.beta_rad)
                .map_err(|e| format!("segment {}: {e}", f.segment_index))?;
            Ok(ControlSpan { t0: f.t_s, dt: end - f.t_s, law, segment: f.segment_index })
        })
        .collect()
}

pub fn export_control_history(solution: &TrajectorySolution, samples: usize, path: &Path) -> Result<(), CliError> {
    write_csv(path, &control_history(solution, samples))
}

pub fn read_control_history(path: &Path) -> Result<Vec<ControlRow>, CliError> {
    let name = path.display().to_string();
    let file = File::open(path).map_err(|source| CliError::Read { path: name.clone(), source })?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Controls { path: name, message: e.to_string() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub t_s: f64,
    pub x_km: f64,
    pub y_km: f64,
    pub z_km: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub mass_kg: f64,
}

/// Uniform inertial samples over the whole flight.
pub fn trajectory_samples(solution: &TrajectorySolution) -> Result<Vec<SampleRow>, CliError> {
    let rows = MIN_TRAJECTORY_ROWS.max((TRAJECTORY_ROWS_PER_REV * solution.revolutions).ceil() as usize);
    let t0 = solution.start_epoch();
    (0..rows)
        .map(|k| {
            let t = t0 + solution.tof * k as f64 / (rows - 1) as f64;
            let s = solution.state_at(t)?;
            Ok(SampleRow {
                t_s: t,
                x_km: s.pos[0],
                y_km: s.pos[1],
                z_km: s.pos[2],
                vx: s.vel[0],
                vy: s.vel[1],
                vz: s.vel[2],
                mass_kg: solution.mass_at(t),
            })
        })
        .collect()
}

pub fn export_trajectory_samples(solution: &TrajectorySolution, path: &Path) -> Result<(), CliError> {
    write_csv(path, &trajectory_samples(solution)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSpacecraft {
    pub mass_kg: f64,
    pub thrust_n: f64,
    pub accel_km_s2: f64,
    pub isp_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedStep {
    pub t_start_s: f64,
    pub t_end_s: f64,
    /// Inertial unit thrust direction.
    pub control: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedDocument {
    pub epoch_s: f64,
    pub tof_s: f64,
    pub mu_km3_s2: f64,
    pub spacecraft: SeedSpacecraft,
    pub steps_per_rev: usize,
    pub control_magnitude: f64,
    pub steps: Vec<SeedStep>,
}

/// Uniform-in-time thrust directions, `ceil(revolutions·steps_per_rev)`
/// steps, sampled at each step midpoint in the local orbital frame.
pub fn seed_document(solution: &TrajectorySolution, steps_per_rev: usize) -> Result<SeedDocument, CliError> {
    let sc = &solution.scenario.spacecraft;
    let t0 = solution.start_epoch();
    let count = if solution.tof > 0.0 {
        ((solution.revolutions * steps_per_rev as f64).ceil() as usize).max(1)
    } else {
        0
    };
    let h = solution.tof / count.max(1) as f64;
    let steps = (0..count)
        .map(|i| {
            let (a, b) = (t0 + h * i as f64, t0 + h * (i + 1) as f64);
            let (rec, tau) = solution.record_at(0.5 * (a + b)).expect("solution has pieces");
            let s = rec.inertial_at(tau)?;
            let d = local_direction(s.pos, s.vel, rec.law.alpha_at(tau), rec.law.beta());
            let control = vec3::unit(d).unwrap_or(d);
            Ok(SeedStep { t_start_s: a, t_end_s: b, control })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(SeedDocument {
        epoch_s: t0,
        tof_s: solution.tof,
        mu_km3_s2: solution.scenario.mu,
        spacecraft: SeedSpacecraft {
            mass_kg: sc.initial_mass(),
            thrust_n: sc.thrust(),
            accel_km_s2: sc.accel(),
            isp_s: sc.isp(),
        },
        steps_per_rev,
        control_magnitude: 1.0,
        steps,
    })
}

pub fn export_seed(solution: &TrajectorySolution, steps_per_rev: usize, path: &Path) -> Result<(), CliError> {
    let doc = seed_document(solution, steps_per_rev)?;
    write_json(path, &doc)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("document serializes") + "\n";
    fs::write(path, text).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let name = path.display().to_string();
    let io_err = |source| CliError::Write { path: name.clone(), source };
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(e.into()))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_err(e.into()))?;
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cw_seed::builder::{evaluate_chain, Scenario, ScenarioKind, SegmentParams, Target};
    use cw_seed::frames::InertialState;
    use cw_seed::performance::SpacecraftParams;

    const MU: f64 = 398600.4418;

    fn solution(accel: f64, params: Vec<SegmentParams>) -> TrajectorySolution {
        let r = 7000.0;
        let start = InertialState::new([r, 0.0, 0.0], [0.0, (MU / r).sqrt(), 0.0], 0.0).unwrap();
        let sc = Scenario::new(
            ScenarioKind::Raising,
            MU,
            start,
            Target::Sma(7100.0),
            SpacecraftParams::from_accel(100.0, accel, 3000.0).unwrap(),
            params.len(),
            (0.0, 1e6),
        )
        .unwrap();
        let chain = evaluate_chain(&sc, &params).unwrap();
        TrajectorySolution::from_chain(&sc, params, chain, 0.0, 0, true).unwrap()
    }

    fn thrusting() -> TrajectorySolution {
        solution(
            1e-6,
            vec![
                SegmentParams::new(2000.0, 1.5, 1e-4, 0.1),
                SegmentParams::new(0.0, 0.0, 1e-4, 0.0),
                SegmentParams::new(3000.0, 1.7, -2e-4, -0.2),
            ],
        )
    }

    #[test]
    fn zero_thrust_single_segment_history() {
        let s = solution(0.0, vec![SegmentParams::new(600.0, 0.0, 0.0, 0.0)]);
        let rows = control_history(&s, 10);
        assert_eq!(rows.len(), 11);
        assert!(rows.iter().all(|r| r.accel_km_s2 == 0.0 && r.segment_index == 0));
        assert_eq!(rows[10].t_s, 600.0);
    }

    #[test]
    fn history_row_count_and_spans() {
        let s = thrusting();
        let rows = control_history(&s, 7);
        assert_eq!(rows.len(), 3 * 7 + 1);
        let spans = spans_from_rows(&rows).unwrap();
        assert_eq!(spans.len(), 3);
        for (span, p) in spans.iter().zip(&s.params) {
            assert!((span.dt - p.dt).abs() < 1e-9);
            assert_eq!(span.law.alpha_rate(), p.rate);
        }
        // Unwrapped angle at the end of the last segment.
        assert!((rows.last().unwrap().alpha_rad - (1.7 - 2e-4 * 3000.0)).abs() < 1e-12);
    }

    #[test]
    fn malformed_histories_are_rejected() {
        let s = thrusting();
        let mut rows = control_history(&s, 2);
        assert!(spans_from_rows(&[]).is_err());
        rows[1].segment_index = 2;
        assert!(spans_from_rows(&rows).is_err());
        let mut rows = control_history(&s, 2);
        rows[1].t_s = -1.0;
        assert!(spans_from_rows(&rows).is_err());
    }

    #[test]
    fn samples_start_at_start_and_lose_mass() {
        let s = thrusting();
        let rows = trajectory_samples(&s).unwrap();
        assert_eq!(rows.len(), MIN_TRAJECTORY_ROWS);
        let first = rows[0];
        let p0 = s.scenario.start.pos;
        assert!(((first.x_km - p0[0]).powi(2) + (first.y_km - p0[1]).powi(2) + first.z_km.powi(2)).sqrt() < 1e-9);
        assert!(rows.windows(2).all(|w| w[1].mass_kg <= w[0].mass_kg));
        assert_eq!(rows.last().unwrap().t_s, s.tof);
    }

    #[test]
    fn seed_controls_are_unit_vectors() {
        let s = thrusting();
        let doc = seed_document(&s, 10).unwrap();
        assert_eq!(doc.steps.len(), (s.revolutions * 10.0).ceil() as usize);
        for st in &doc.steps {
            assert!((vec3::norm(st.control) - 1.0).abs() <= 1e-12);
        }
        assert_eq!(doc.steps.last().unwrap().t_end_s, s.tof);
    }

    #[test]
    fn zero_duration_seed_is_empty() {
        let s = solution(1e-6, vec![SegmentParams::new(0.0, 0.0, 0.0, 0.0)]);
        let doc = seed_document(&s, 10).unwrap();
        assert!(doc.steps.is_empty());
        serde_json::to_string(&doc).unwrap();
    }
}
