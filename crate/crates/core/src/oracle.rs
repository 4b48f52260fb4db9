//! Fixed-step classic Runge-Kutta integration.
//!
//! Serves as the brute-force reference for the closed-form propagator, the
//! fallback inside the resonance band, and the full two-body re-propagation
//! of built trajectories.

use crate::error::{Error, Result};
use crate::hill::{cw_derivative, thrust_components, ControlLaw, HillState};
use crate::scalar::Scalar;
use crate::vec3::{self, Vec3};

/// Radius below which two-body integration is abandoned (km).
pub const MIN_RADIUS_KM: f64 = 1.0;

/// Step-size policy for the fixed-step integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationSettings<T> {
    /// Exact number of uniform steps over the interval.
    Steps(usize),
    /// Largest allowed step; the interval is split uniformly.
    MaxStep(T),
}

impl<T: Scalar> IntegrationSettings<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Steps(0) => Err(Error::InvalidInput("step count must be at least 1".into())),
            Self::MaxStep(h) if !(h > T::zero() && h.is_finite()) => Err(Error::InvalidInput(
                format!("maximum step must be positive, got {h}"),
            )),
            _ => Ok(()),
        }
    }

    /// Number of uniform steps used for an interval of length `dt`.
    pub fn step_count(&self, dt: T) -> usize {
        match *self {
            Self::Steps(n) => n.max(1),
            Self::MaxStep(h) => (dt.abs() / h).ceil().to_usize().unwrap_or(1).max(1),
        }
    }

    /// Default resolution: `steps_per_rev` steps per revolution of the mean
    /// motion `n`.
    pub fn per_revolution(n: T, steps_per_rev: usize) -> Self {
        Self::MaxStep(T::TAU() / (n * T::lit(steps_per_rev as f64)))
    }
}

/// Default number of RK4 steps per reference-orbit revolution.
pub const DEFAULT_STEPS_PER_REV: usize = 100;

/// One classic RK4 step of `y' = f(t, y)`.
pub fn rk4_step<T: Scalar, const N: usize>(
    f: &impl Fn(T, &[T; N]) -> [T; N],
    t: T,
    y: &[T; N],
    h: T,
) -> [T; N] {
    let half = T::lit(0.5);
    let axpy = |a: T, x: &[T; N], y: &[T; N]| -> [T; N] { std::array::from_fn(|i| y[i] + a * x[i]) };
    let k1 = f(t, y);
    let k2 = f(t + half * h, &axpy(half * h, &k1, y));
    let k3 = f(t + half * h, &axpy(half * h, &k2, y));
    let k4 = f(t + h, &axpy(h, &k3, y));
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    std::array::from_fn(|i| y[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
}

/// Integrates the thrust-forced CW equations over `dt` seconds.
pub fn integrate_numeric<T: Scalar>(
    state: &HillState<T>,
    law: &ControlLaw<T>,
    n: T,
    dt: T,
    settings: &IntegrationSettings<T>,
) -> HillState<T> {
    if dt == T::zero() {
        return *state;
    }
    let steps = settings.step_count(dt);
    let h = dt / T::lit(steps as f64);
    let rhs = |t: T, y: &[T; 6]| -> [T; 6] {
        cw_derivative(&HillState::from_array(*y), thrust_components(law, t), n).to_array()
    };
    let mut y = state.to_array();
    for i in 0..steps {
        y = rk4_step(&rhs, T::lit(i as f64) * h, &y, h);
    }
    HillState::from_array(y)
}

/// Integrates `r̈ = −μ·r/|r|³ + accel(t, r, ṙ)` over `dt` seconds, `t`
/// measured from the start of the interval.
pub fn integrate_two_body<T: Scalar>(
    pos: Vec3<T>,
    vel: Vec3<T>,
    accel: impl Fn(T, Vec3<T>, Vec3<T>) -> Vec3<T>,
    mu: T,
    dt: T,
    settings: &IntegrationSettings<T>,
) -> Result<(Vec3<T>, Vec3<T>)> {
    let min_r = T::lit(MIN_RADIUS_KM);
    let r0 = vec3::norm(pos);
    if !(r0 >= min_r) {
        return Err(Error::SingularRadius { radius: r0.as_f64() });
    }
    if dt == T::zero() {
        return Ok((pos, vel));
    }
    let steps = settings.step_count(dt);
    let h = dt / T::lit(steps as f64);
    let singular = std::cell::Cell::new(None::<T>);
    let rhs = |t: T, y: &[T; 6]| -> [T; 6] {
        let r = [y[0], y[1], y[2]];
        let rn = vec3::norm(r);
        if !(rn >= min_r) && singular.get().is_none() {
            singular.set(Some(rn));
        }
        let g = -mu / (rn * rn * rn);
        let a = accel(t, r, [y[3], y[4], y[5]]);
        [y[3], y[4], y[5], g * r[0] + a[0], g * r[1] + a[1], g * r[2] + a[2]]
    };
    let mut y = [pos[0], pos[1], pos[2], vel[0], vel[1], vel[2]];
    for i in 0..steps {
        y = rk4_step(&rhs, T::lit(i as f64) * h, &y, h);
        if let Some(r) = singular.get() {
            return Err(Error::SingularRadius { radius: r.as_f64() });
        }
    }
    Ok(([y[0], y[1], y[2]], [y[3], y[4], y[5]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::cw_stm;
    use std::f64::consts::TAU;

    const MU_EARTH: f64 = 398600.4418;

    #[test]
    fn zero_state_stays_zero() {
        let s = integrate_numeric(
            &HillState::zero(),
            &ControlLaw::coast(),
            1e-3,
            1e4,
            &IntegrationSettings::Steps(17),
        );
        assert_eq!(s, HillState::zero());
    }

    #[test]
    fn settings_validation() {
        assert!(IntegrationSettings::<f64>::Steps(0).validate().is_err());
        assert!(IntegrationSettings::<f64>::MaxStep(0.0).validate().is_err());
        assert!(IntegrationSettings::<f64>::MaxStep(1.0).validate().is_ok());
        assert_eq!(IntegrationSettings::MaxStep(10.0).step_count(95.0), 10);
        assert_eq!(IntegrationSettings::MaxStep(10.0).step_count(100.0), 10);
        assert_eq!(IntegrationSettings::<f64>::per_revolution(1.0, 100).step_count(TAU), 100);
    }

    #[test]
    fn unforced_matches_stm_over_one_period() {
        let n = 1.1e-3;
        let t = TAU / n;
        let s0 = HillState::new(0.4, -1.2, 0.3, 2e-4, -1e-4, 5e-5);
        let num = integrate_numeric(&s0, &ControlLaw::coast(), n, t, &IntegrationSettings::Steps(10_000));
        let stm = cw_stm(n, t).apply(&s0);
        assert!((num - stm).scaled_norm(6778.0, n) <= 1e-10);
    }

    /// Error of an `h`-step run against a reference computed with 10× finer
    /// steps than the finest run.
    fn cw_errors(coarse: usize) -> (f64, f64) {
        let law = ControlLaw::new(2e-6, 0.3, 7e-4, 0.25).unwrap();
        let n = 1.1e-3;
        let dt = 5000.0;
        let s0 = HillState::new(0.2, -0.5, 0.1, 1e-4, -2e-4, 3e-5);
        let run = |steps| integrate_numeric(&s0, &law, n, dt, &IntegrationSettings::Steps(steps));
        let reference = run(coarse * 20);
        let e1 = (run(coarse) - reference).scaled_norm(6778.0, n);
        let e2 = (run(coarse * 2) - reference).scaled_norm(6778.0, n);
        (e1, e2)
    }

    #[test]
    fn cw_integrator_is_fourth_order() {
        let (e1, e2) = cw_errors(40);
        let ratio = e1 / e2;
        assert!(ratio >= 12.0 && ratio <= 20.0, "ratio {ratio}");
    }

    fn circular(r: f64) -> (Vec3<f64>, Vec3<f64>, f64) {
        let v = (MU_EARTH / r).sqrt();
        ([r, 0.0, 0.0], [0.0, v, 0.0], TAU * (r.powi(3) / MU_EARTH).sqrt())
    }

    #[test]
    fn circular_orbit_closes_after_one_period() {
        let (p, v, period) = circular(7000.0);
        let (pf, vf) = integrate_two_body(p, v, |_, _, _| [0.0; 3], MU_EARTH, period, &IntegrationSettings::Steps(100_000)).unwrap();
        let dp = vec3::norm(vec3::sub(pf, p)) / 7000.0;
        let dv = vec3::norm(vec3::sub(vf, v)) / vec3::norm(v);
        assert!(dp <= 1e-8 && dv <= 1e-8, "{dp:e} {dv:e}");
    }

    #[test]
    fn two_body_energy_conserved() {
        let p = [7000.0, 300.0, -200.0];
        let v = [0.5, 7.9, 1.1];
        let energy = |p: Vec3<f64>, v: Vec3<f64>| 0.5 * vec3::dot(v, v) - MU_EARTH / vec3::norm(p);
        let e0 = energy(p, v);
        let a = -MU_EARTH / (2.0 * e0);
        let period = TAU * (a.powi(3) / MU_EARTH).sqrt();
        let (pf, vf) = integrate_two_body(p, v, |_, _, _| [0.0; 3], MU_EARTH, period, &IntegrationSettings::Steps(100_000)).unwrap();
        assert!(((energy(pf, vf) - e0) / e0).abs() <= 1e-10);
    }

    #[test]
    fn two_body_integrator_is_fourth_order() {
        let (p, v, period) = circular(7000.0);
        let thrust = |t: f64, _, _| [1e-5 * (1e-3 * t).cos(), 1e-5, 2e-6];
        let run = |steps| {
            integrate_two_body(p, v, thrust, MU_EARTH, 0.5 * period, &IntegrationSettings::Steps(steps)).unwrap().0
        };
        let reference = run(4000);
        let e1 = vec3::norm(vec3::sub(run(200), reference));
        let e2 = vec3::norm(vec3::sub(run(400), reference));
        let ratio = e1 / e2;
        assert!(ratio >= 12.0 && ratio <= 20.0, "ratio {ratio}");
    }

    #[test]
    fn singular_radius_detected() {
        // Straight fall towards the origin.
        let r = integrate_two_body([10.0, 0.0, 0.0], [0.0; 3], |_, _, _| [0.0; 3], MU_EARTH, 100.0, &IntegrationSettings::Steps(1000));
        assert!(matches!(r, Err(Error::SingularRadius { .. })));
        let r = integrate_two_body([0.5, 0.0, 0.0], [0.0; 3], |_, _, _| [0.0; 3], MU_EARTH, 1.0, &IntegrationSettings::Steps(1));
        assert!(matches!(r, Err(Error::SingularRadius { .. })));
    }
}
