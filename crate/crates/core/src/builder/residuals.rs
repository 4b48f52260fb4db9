use crate::error::{Error, Result};
use crate::frames::{propagate_target, InertialState};
use crate::vec3;

use super::chain::{evaluate_chain_with, ChainSettings};
use super::scenario::{Scenario, ScenarioKind, SegmentParams, Target};

/// Boundary miss of a chained trajectory.
pub fn residuals(scenario: &Scenario, params: &[SegmentParams]) -> Result<Vec<f64>> {
    let chain = evaluate_chain_with(scenario, params, &ChainSettings::default())?;
    boundary_residuals(scenario, &chain.final_state)
}

/// Nondimensional miss of `arrival` against the scenario target.
pub fn boundary_residuals(scenario: &Scenario, arrival: &InertialState<f64>) -> Result<Vec<f64>> {
    let l = scenario.length_scale();
    let n_ref = scenario.reference_rate();
    match (scenario.kind, &scenario.target) {
        (ScenarioKind::Rendezvous | ScenarioKind::Phasing, Target::Body(body)) => {
            let target = propagate_target(body, scenario.mu, arrival.epoch)?;
            let dp = vec3::scale(1.0 / l, vec3::sub(arrival.pos, target.pos));
            if scenario.kind == ScenarioKind::Phasing {
                return Ok(dp.to_vec());
            }
            let dv = vec3::scale(1.0 / (l * n_ref), vec3::sub(arrival.vel, target.vel));
            Ok(vec![dp[0], dp[1], dp[2], dv[0], dv[1], dv[2]])
        }
        (ScenarioKind::Raising, Target::Sma(sma)) => {
            // Vis-viva keeps the residual defined for hyperbolic overshoots.
            let a = -scenario.mu / (2.0 * arrival.energy(scenario.mu));
            Ok(vec![(a - sma) / l])
        }
        (ScenarioKind::Insertion, Target::Orbit(target)) => {
            let mu = scenario.mu;
            let a = -mu / (2.0 * arrival.energy(mu));
            let (node, in_plane, _) = plane_axes(target.raan, target.inc);
            let w = vec3::unit(arrival.angular_momentum())
                .ok_or_else(|| Error::DegenerateOrbit("arrival state is rectilinear".into()))?;
            let e_vec = eccentricity_vector(arrival, mu);
            let mut r = vec![(a - target.sma) / l];
            if target.ecc < CIRCULAR_TARGET_ECC {
                r.push(vec3::dot(e_vec, node));
                r.push(vec3::dot(e_vec, in_plane));
            } else {
                r.push(vec3::norm(e_vec) - target.ecc);
            }
            // Tilt of the arrival plane: ≈ Δinc and Δraan·sin(inc), but smooth
            // through zero inclination.
            r.push(-vec3::dot(w, in_plane));
            r.push(vec3::dot(w, node));
            Ok(r)
        }
        _ => unreachable!("scenario validation pairs kinds with targets"),
    }
}

/// Targets with eccentricity below this are matched on the eccentricity
/// vector, which stays differentiable at circular arrival.
pub const CIRCULAR_TARGET_ECC: f64 = 1e-6;

fn eccentricity_vector(s: &InertialState<f64>, mu: f64) -> [f64; 3] {
    let r = s.radius();
    let v2 = vec3::dot(s.vel, s.vel);
    let rv = vec3::dot(s.pos, s.vel);
    vec3::scale(1.0 / mu, vec3::sub(vec3::scale(v2 - mu / r, s.pos), vec3::scale(rv, s.vel)))
}

/// Ascending-node direction, in-plane perpendicular and normal of a plane.
fn plane_axes(raan: f64, inc: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (so, co) = raan.sin_cos();
    let (si, ci) = inc.sin_cos();
    let node = [co, so, 0.0];
    let normal = [so * si, -co * si, ci];
    (node, vec3::cross(normal, node), normal)
}

pub fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}


#[cfg(test)]
mod insertion_tests {
    use super::*;
    use crate::frames::{elements_to_state, KeplerianElements};
    use crate::performance::SpacecraftParams;
    use crate::builder::scenario::SegmentParams;

    const MU: f64 = 398600.4418;

    fn insertion(start: KeplerianElements<f64>, target: KeplerianElements<f64>) -> Vec<f64> {
        let sc = Scenario::new(
            ScenarioKind::Insertion,
            MU,
            elements_to_state(&start, MU),
            Target::Orbit(target),
            SpacecraftParams::from_accel(100.0, 0.0, 3000.0).unwrap(),
            1,
            (0.0, 1.0),
        )
        .unwrap();
        residuals(&sc, &[SegmentParams::new(0.0, 0.0, 0.0, 0.0)]).unwrap()
    }

    #[test]
    fn plane_terms_match_element_differences() {
        let target = KeplerianElements::new(8000.0, 0.1, 0.5, 1.0, 0.3, 0.0).unwrap();
        let (di, dr) = (1e-5, 2e-5);
        let start = KeplerianElements::new(8000.0, 0.1, 0.5 + di, 1.0 + dr, 0.3, 2.0).unwrap();
        let r = insertion(start, target);
        assert_eq!(r.len(), 4);
        assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12);
        assert!((r[2] - di).abs() < 1e-9, "{r:?}");
        assert!((r[3] - dr * 0.5f64.sin()).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn circular_equatorial_target_uses_vectors() {
        let target = KeplerianElements::new(42165.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let start = KeplerianElements::new(42165.0, 0.01, 0.02, 0.7, 0.4, 1.0).unwrap();
        let r = insertion(start, target);
        assert_eq!(r.len(), 5);
        let e = (r[1] * r[1] + r[2] * r[2]).sqrt();
        let tilt = (r[3] * r[3] + r[4] * r[4]).sqrt();
        assert!((e - 0.01).abs() < 1e-5);
        assert!((tilt - 0.02f64.sin()).abs() < 1e-9);
    }
}
