use crate::error::{Error, Result};
use crate::frames::InertialState;
use crate::performance::{delta_v, revolutions_from_positions};

use super::chain::{Chain, SegmentRecord};
use super::scenario::{Scenario, SegmentParams};

/// Inertial samples per reference revolution kept with a solution.
pub const SAMPLES_PER_REV: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySolution {
    pub scenario: Scenario,
    pub params: Vec<SegmentParams>,
    /// Propagated pieces in time order. A parameter set maps to more than one
    /// piece when the deviation guard split it.
    pub records: Vec<SegmentRecord>,
    pub samples: Vec<InertialState<f64>>,
    /// Seconds.
    pub tof: f64,
    /// km/s.
    pub delta_v: f64,
    /// kg.
    pub propellant: f64,
    pub revolutions: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl TrajectorySolution {
    pub fn from_chain(
        scenario: &Scenario,
        params: Vec<SegmentParams>,
        chain: Chain,
        residual_norm: f64,
        iterations: usize,
        converged: bool,
    ) -> Result<Self> {
        let tof = chain.tof();
        let samples = sample_records(&scenario.start, &chain.records)?;
        let revolutions = revolutions_of(&samples)?;
        let sc = &scenario.spacecraft;
        Ok(Self {
            scenario: scenario.clone(),
            params,
            records: chain.records,
            samples,
            tof,
            delta_v: delta_v(sc.accel(), tof),
            propellant: sc.propellant(tof),
            revolutions,
            residual_norm,
            iterations,
            converged,
        })
    }

    /// Joins sequentially solved sections of `scenario`.
    pub fn concatenate(scenario: &Scenario, parts: Vec<TrajectorySolution>) -> Result<Self> {
        let mut params = Vec::new();
        let mut records = Vec::new();
        let (mut iterations, mut residual_norm, mut converged) = (0, 0.0f64, true);
        for p in parts {
            params.extend(p.params);
            records.extend(p.records);
            iterations += p.iterations;
            residual_norm = residual_norm.max(p.residual_norm);
            converged &= p.converged;
        }
        let final_state = records.last().map_or(scenario.start, SegmentRecord::end_inertial);
        let mut whole = scenario.clone();
        whole.segments = params.len();
        let chain = Chain { records, final_state };
        Self::from_chain(&whole, params, chain, residual_norm, iterations, converged)
    }

    pub fn start_epoch(&self) -> f64 {
        self.scenario.start.epoch
    }

    pub fn final_state(&self) -> InertialState<f64> {
        self.records.last().map_or(self.scenario.start, SegmentRecord::end_inertial)
    }

    /// Piece active at time `t` (seconds past scenario start) and the offset
    /// into it. Times past the end map to the last piece.
    pub fn record_at(&self, t: f64) -> Option<(&SegmentRecord, f64)> {
        let i = self.records.partition_point(|r| r.end_epoch() <= t);
        let rec = self.records.get(i).or_else(|| self.records.last())?;
        Some((rec, (t - rec.epoch()).clamp(0.0, rec.dt)))
    }

    pub fn state_at(&self, t: f64) -> Result<InertialState<f64>> {
        match self.record_at(t) {
            Some((rec, tau)) => rec.inertial_at(tau),
            None => Ok(self.scenario.start),
        }
    }

    pub fn mass_at(&self, t: f64) -> f64 {
        let burn = (t - self.start_epoch()).clamp(0.0, self.tof);
        self.scenario.spacecraft.mass_at(burn)
    }

    /// Inertial unit thrust direction at time `t`.
    pub fn thrust_direction_at(&self, t: f64) -> Option<[f64; 3]> {
        self.record_at(t).map(|(rec, tau)| rec.thrust_direction(tau))
    }

    pub fn continuity_error(&self) -> f64 {
        Chain {
            records: self.records.clone(),
            final_state: self.final_state(),
        }
        .continuity_error()
    }
}

pub fn count_revolutions(solution: &TrajectorySolution) -> Result<f64> {
    revolutions_of(&solution.samples)
}

fn revolutions_of(samples: &[InertialState<f64>]) -> Result<f64> {
    let positions: Vec<_> = samples.iter().map(|s| s.pos).collect();
    match revolutions_from_positions(&positions) {
        // A straight or empty path has no plane to count in.
        Err(Error::InvalidInput(_)) => Ok(0.0),
        other => other,
    }
}

fn sample_records(start: &InertialState<f64>, records: &[SegmentRecord]) -> Result<Vec<InertialState<f64>>> {
    let mut samples = vec![*start];
    for rec in records {
        let pieces = (SAMPLES_PER_REV * rec.dt / rec.reference.period()).ceil().max(1.0) as usize;
        for j in 1..pieces {
            samples.push(rec.inertial_at(rec.dt * j as f64 / pieces as f64)?);
        }
        samples.push(rec.end_inertial());
    }
    Ok(samples)
}
