use crate::analytic::propagate_segment;
use crate::error::{Error, Result};
use crate::frames::{hill_to_inertial, recenter_reference, InertialState};
use crate::hill::{ControlLaw, HillState, ReferenceOrbit};
use crate::oracle::{integrate_numeric, IntegrationSettings};
use crate::vec3;

use super::scenario::{Scenario, SegmentParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSettings {
    /// Mid-segment Hill-frame distance, as a fraction of the reference
    /// radius, above which a segment is split in half.
    pub deviation_limit: f64,
    pub max_bisections: u32,
    /// Longest piece, s. Longer segments are propagated as equal pieces.
    pub max_piece: f64,
    /// Propagate resonant segments with RK4 instead of failing.
    pub numeric_fallback: bool,
    pub fallback_steps_per_rev: usize,
}

impl Default for ChainSettings {
    fn default() -> Self {
        Self {
            deviation_limit: 0.05,
            max_bisections: 8,
            max_piece: f64::INFINITY,
            numeric_fallback: true,
            fallback_steps_per_rev: 1000,
        }
    }
}

/// One propagated piece of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentRecord {
    pub reference: ReferenceOrbit<f64>,
    pub law: ControlLaw<f64>,
    pub dt: f64,
    pub start: HillState<f64>,
    pub end: HillState<f64>,
    /// Index of the [`SegmentParams`] entry the piece came from.
    pub param_index: usize,
    /// RK4 step bound when the piece was propagated numerically.
    pub numeric_step: Option<f64>,
}

impl SegmentRecord {
    /// Start time, seconds past scenario start.
    pub fn epoch(&self) -> f64 {
        self.reference.epoch()
    }

    pub fn end_epoch(&self) -> f64 {
        self.epoch() + self.dt
    }

    /// Hill state `tau` seconds into the piece.
    pub fn state_at(&self, tau: f64) -> Result<HillState<f64>> {
        if tau == self.dt {
            return Ok(self.end);
        }
        propagate(&self.start, &self.law, self.reference.mean_motion(), tau, self.numeric_step)
    }

    pub fn inertial_at(&self, tau: f64) -> Result<InertialState<f64>> {
        Ok(hill_to_inertial(&self.state_at(tau)?, &self.reference, tau))
    }

    pub fn start_inertial(&self) -> InertialState<f64> {
        hill_to_inertial(&self.start, &self.reference, 0.0)
    }

    pub fn end_inertial(&self) -> InertialState<f64> {
        hill_to_inertial(&self.end, &self.reference, self.dt)
    }

    /// Inertial unit thrust direction `tau` seconds into the piece.
    pub fn thrust_direction(&self, tau: f64) -> [f64; 3] {
        let triad = self.reference.triad();
        let (xh, yh) = triad.rotated(self.reference.mean_motion() * tau);
        let (sa, ca) = self.law.alpha_at(tau).sin_cos();
        let (sb, cb) = self.law.beta().sin_cos();
        vec3::combine(cb * ca, xh, cb * sa, yh, sb, triad.normal)
    }
}

fn propagate(
    state: &HillState<f64>,
    law: &ControlLaw<f64>,
    n: f64,
    dt: f64,
    numeric_step: Option<f64>,
) -> Result<HillState<f64>> {
    match numeric_step {
        None => propagate_segment(state, law, n, dt),
        Some(h) => Ok(integrate_numeric(state, law, n, dt, &IntegrationSettings::MaxStep(h))),
    }
}

/// Chained propagation of a full control sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub records: Vec<SegmentRecord>,
    pub final_state: InertialState<f64>,
}

impl Chain {
    pub fn tof(&self) -> f64 {
        self.records.iter().map(|r| r.dt).sum()
    }

    /// Largest relative mismatch between the inertial end of one piece and
    /// the inertial start of the next.
    pub fn continuity_error(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| {
                let a = w[0].end_inertial();
                let b = w[1].start_inertial();
                let dp = vec3::norm(vec3::sub(a.pos, b.pos)) / a.radius();
                let dv = vec3::norm(vec3::sub(a.vel, b.vel)) / a.speed().max(f64::MIN_POSITIVE);
                dp.max(dv)
            })
            .fold(0.0, f64::max)
    }
}

pub fn evaluate_chain(scenario: &Scenario, params: &[SegmentParams]) -> Result<Chain> {
    evaluate_chain_with(scenario, params, &ChainSettings::default())
}

/// Propagates the start state through every segment, re-centering the Hill
/// frame at each connection point.
pub fn evaluate_chain_with(
    scenario: &Scenario,
    params: &[SegmentParams],
    settings: &ChainSettings,
) -> Result<Chain> {
    if params.len() != scenario.segments {
        return Err(Error::InvalidInput(format!(
            "expected {} segment parameter sets, got {}",
            scenario.segments,
            params.len()
        )));
    }
    let accel = scenario.spacecraft.accel();
    let mut records = Vec::with_capacity(params.len());
    let mut state = scenario.start;
    for (i, p) in params.iter().enumerate() {
        if !(p.dt >= 0.0 && p.dt.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "segment {i} duration must be non-negative, got {}",
                p.dt
            )));
        }
        let law = ControlLaw::new(accel, p.alpha0, p.rate, p.beta)?;
        let pieces = if p.dt > settings.max_piece { (p.dt / settings.max_piece).ceil() as usize } else { 1 };
        let h = p.dt / pieces as f64;
        for j in 0..pieces {
            let piece_law = if j == 0 { law } else { law.shifted(h * j as f64) };
            state = push_piece(&mut records, state, piece_law, h, i, scenario.mu, settings, 0)?;
        }
    }
    Ok(Chain {
        records,
        final_state: state,
    })
}

#[allow(clippy::too_many_arguments)]
fn push_piece(
    records: &mut Vec<SegmentRecord>,
    state: InertialState<f64>,
    law: ControlLaw<f64>,
    dt: f64,
    index: usize,
    mu: f64,
    settings: &ChainSettings,
    depth: u32,
) -> Result<InertialState<f64>> {
    let (reference, start) = recenter_reference(&state, mu)?;
    let n = reference.mean_motion();
    if dt == 0.0 {
        records.push(SegmentRecord {
            reference,
            law,
            dt,
            start,
            end: start,
            param_index: index,
            numeric_step: None,
        });
        return Ok(state);
    }
    let numeric_step = match propagate_segment(&start, &law, n, 0.5 * dt) {
        Err(Error::ResonantSteeringRate { .. }) if settings.numeric_fallback => {
            Some(reference.period() / settings.fallback_steps_per_rev.max(1) as f64)
        }
        Err(e) => return Err(e),
        Ok(mid) => {
            if depth < settings.max_bisections
                && vec3::norm(mid.position()) > settings.deviation_limit * reference.radius()
            {
                let half = 0.5 * dt;
                let next = push_piece(records, state, law, half, index, mu, settings, depth + 1)?;
                return push_piece(records, next, law.shifted(half), half, index, mu, settings, depth + 1);
            }
            None
        }
    };
    let end = propagate(&start, &law, n, dt, numeric_step)?;
    let record = SegmentRecord {
        reference,
        law,
        dt,
        start,
        end,
        param_index: index,
        numeric_step,
    };
    records.push(record);
    Ok(record.end_inertial())
}
