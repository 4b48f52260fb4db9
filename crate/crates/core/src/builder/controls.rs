use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::frames::InertialState;
use crate::hill::ControlLaw;
use crate::oracle::{integrate_two_body, IntegrationSettings};
use crate::vec3::{self, Vec3};

use super::solution::TrajectorySolution;

/// Steering of one segment, in absolute time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSpan {
    /// Start, seconds past scenario start.
    pub t0: f64,
    pub dt: f64,
    /// Thrust magnitude and steering angles; `law.alpha_at(t − t0)`.
    pub law: ControlLaw<f64>,
    pub segment: usize,
}

/// Per-segment steering of a solution.
pub fn control_spans(solution: &TrajectorySolution) -> Result<Vec<ControlSpan>> {
    let accel = solution.scenario.spacecraft.accel();
    let mut t0 = solution.start_epoch();
    solution
        .params
        .iter()
        .enumerate()
        .map(|(segment, p)| {
            let span = ControlSpan {
                t0,
                dt: p.dt,
                law: ControlLaw::new(accel, p.alpha0, p.rate, p.beta)?,
                segment,
            };
            t0 += p.dt;
            Ok(span)
        })
        .collect()
}

/// Unit vector at steering angles `(alpha, beta)` in the local
/// radial/along-track/orbit-normal frame of `(pos, vel)`.
pub fn local_direction(pos: Vec3<f64>, vel: Vec3<f64>, alpha: f64, beta: f64) -> Vec3<f64> {
    let radial = vec3::unit(pos).unwrap_or([1.0, 0.0, 0.0]);
    let normal = vec3::unit(vec3::cross(pos, vel)).unwrap_or([0.0, 0.0, 1.0]);
    let along = vec3::cross(normal, radial);
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    vec3::combine(cb * ca, radial, cb * sa, along, sb, normal)
}

/// Full two-body propagation of a steering history, with the angles applied
/// in the spacecraft's own local frame.
pub fn repropagate(
    start: &InertialState<f64>,
    mu: f64,
    spans: &[ControlSpan],
    steps_per_rev: usize,
) -> Result<InertialState<f64>> {
    if steps_per_rev == 0 {
        return Err(Error::InvalidInput("steps per revolution must be at least 1".into()));
    }
    let mut state = *start;
    for span in spans {
        let period = TAU * (state.radius().powi(3) / mu).sqrt();
        let steps = ((span.dt / period) * steps_per_rev as f64).ceil().max(4.0) as usize;
        let law = span.law;
        let thrust = |t: f64, p: Vec3<f64>, v: Vec3<f64>| {
            vec3::scale(law.accel(), local_direction(p, v, law.alpha_at(t), law.beta()))
        };
        let (pos, vel) = integrate_two_body(state.pos, state.vel, thrust, mu, span.dt, &IntegrationSettings::Steps(steps))?;
        state = InertialState::new(pos, vel, span.t0 + span.dt)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const MU: f64 = 398600.4418;

    #[test]
    fn local_direction_axes() {
        let p = [7000.0, 0.0, 0.0];
        let v = [0.0, 7.5, 0.0];
        let d = local_direction(p, v, 0.0, 0.0);
        assert!((d[0] - 1.0).abs() < 1e-15);
        let d = local_direction(p, v, FRAC_PI_2, 0.0);
        assert!((d[1] - 1.0).abs() < 1e-15);
        let d = local_direction(p, v, 0.3, FRAC_PI_2);
        assert!((d[2] - 1.0).abs() < 1e-15);
        assert!((vec3::norm(local_direction(p, [1.0, 7.0, 0.2], 1.1, -0.4)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coasting_span_is_kepler_motion() {
        let r = 7000.0;
        let start = InertialState::new([r, 0.0, 0.0], [0.0, (MU / r).sqrt(), 0.0], 0.0).unwrap();
        let period = TAU * (r.powi(3) / MU).sqrt();
        let spans = [ControlSpan { t0: 0.0, dt: period, law: ControlLaw::coast(), segment: 0 }];
        let end = repropagate(&start, MU, &spans, 2000).unwrap();
        assert!(vec3::norm(vec3::sub(end.pos, start.pos)) < 1e-6);
        assert!((end.epoch - period).abs() < 1e-9);
    }

    #[test]
    fn tangential_thrust_raises_orbit() {
        let r = 7000.0;
        let start = InertialState::new([r, 0.0, 0.0], [0.0, (MU / r).sqrt(), 0.0], 0.0).unwrap();
        let law = ControlLaw::new(1e-6, FRAC_PI_2, 0.0, 0.0).unwrap();
        let spans = [ControlSpan { t0: 0.0, dt: 20_000.0, law, segment: 0 }];
        let end = repropagate(&start, MU, &spans, 200).unwrap();
        let e0 = start.energy(MU);
        let e1 = end.energy(MU);
        // Work done is ∫ a·v dt for thrust along the local horizontal of a near-circular orbit.
        let expected = 1e-6 * (MU / r).sqrt() * 20_000.0;
        assert!(((e1 - e0) - expected).abs() / expected < 0.01);
    }
}
