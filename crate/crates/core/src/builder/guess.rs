use std::f64::consts::FRAC_PI_2;

use crate::vec3;

use super::scenario::{Scenario, SegmentParams};

/// Plane angle below which a target counts as coplanar, rad.
pub const COPLANAR_TOL: f64 = 1e-6;

/// Tangential steering with uniform segment durations spanning the midpoint
/// of the time-of-flight bounds.
///
/// Non-coplanar targets get a constant-magnitude out-of-plane angle whose
/// sign follows the cosine of the argument of latitude measured from the
/// line of nodes between the start and target planes.
pub fn default_initial_guess(scenario: &Scenario) -> Vec<SegmentParams> {
    let m = scenario.segments;
    let tof = scenario.tof_guess();
    let dt = tof / m as f64;
    let alpha0 = if scenario.is_outward() { FRAC_PI_2 } else { -FRAC_PI_2 };
    let betas = out_of_plane_schedule(scenario, dt);
    (0..m).map(|i| SegmentParams::new(dt, alpha0, 0.0, betas.as_ref().map_or(0.0, |b| b[i]))).collect()
}

fn out_of_plane_schedule(scenario: &Scenario, dt: f64) -> Option<Vec<f64>> {
    let target_normal = scenario.target_normal()?;
    let start = &scenario.start;
    let h1 = vec3::unit(start.angular_momentum())?;
    let plane_angle = vec3::dot(h1, target_normal).clamp(-1.0, 1.0).acos();
    if plane_angle < COPLANAR_TOL {
        return None;
    }
    let node = vec3::unit(vec3::cross(h1, target_normal))?;
    let m_axis = vec3::cross(h1, node);
    let tilt = vec3::dot(m_axis, vec3::sub(target_normal, h1));

    // Edelbaum-style plane change with thrust modulated by the latitude sign.
    let mu = scenario.mu;
    let (r1, r2) = (scenario.start_sma(), scenario.target.sma());
    let v_mean = 0.5 * ((mu / r1).sqrt() + (mu / r2).sqrt());
    let needed = FRAC_PI_2 * v_mean * plane_angle;
    let available = scenario.spacecraft.accel() * scenario.tof_guess();
    if !(available > 0.0) {
        return None;
    }
    let beta = (needed / available).min(1.0).asin();

    let u0 = vec3::dot(start.pos, m_axis).atan2(vec3::dot(start.pos, node));
    let n_mean = 0.5 * ((mu / r1.powi(3)).sqrt() + (mu / r2.powi(3)).sqrt());
    Some(
        (0..scenario.segments)
            .map(|i| {
                let u = u0 + n_mean * dt * (i as f64 + 0.5);
                let sign = -(u.cos() * tilt).signum();
                sign * beta
            })
            .collect(),
    )
}
