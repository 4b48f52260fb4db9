//! Closed-form segment propagation checked against numeric integration on
//! random segments.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use cw_seed::analytic::{cw_stm, propagate_segment, RESONANCE_BAND};
use cw_seed::hill::{ControlLaw, HillState};
use cw_seed::oracle::{integrate_numeric, IntegrationSettings};
use cw_seed::{AU_KM, MU_EARTH, MU_SUN};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub cases: usize,
    pub oracle_steps: usize,
    /// Closed form against RK4, positions over the reference radius and
    /// velocities over radius times mean motion.
    pub max_scaled_error: f64,
    pub zero_thrust_cases: usize,
    /// Closed form with no thrust against the transition matrix.
    pub zero_thrust_max_error: f64,
}

impl ValidationReport {
    pub fn passed(&self, tol: f64, zero_thrust_tol: f64) -> bool {
        self.max_scaled_error <= tol && self.zero_thrust_max_error <= zero_thrust_tol
    }
}

struct Case {
    state: HillState<f64>,
    law: ControlLaw<f64>,
    radius: f64,
    n: f64,
    dt: f64,
}

fn random_case(rng: &mut ChaCha8Rng, accel: bool) -> Case {
    let (mu, radius) = if rng.gen_bool(0.5) {
        (MU_EARTH, rng.gen_range(6600.0..50_000.0))
    } else {
        (MU_SUN, rng.gen_range(0.3..2.0) * AU_KM)
    };
    let n = (mu / (radius * radius * radius)).sqrt();
    let dt = rng.gen_range(0.0..1.0) * TAU / n;
    let mut c = |scale: f64| rng.gen_range(-0.05..0.05) * scale;
    let state = HillState::new(c(radius), c(radius), c(radius), c(radius * n), c(radius * n), c(radius * n));
    let a = if accel { rng.gen_range(0.0..1e-2) * n * n * radius } else { 0.0 };
    let band = 2.0 * RESONANCE_BAND * n;
    let k = loop {
        let k = rng.gen_range(-3.0..3.0) * n;
        if k.abs() > band && (k.abs() - n).abs() > band {
            break k;
        }
    };
    let law = ControlLaw::new(a, rng.gen_range(-PI..PI), k, rng.gen_range(-FRAC_PI_2..FRAC_PI_2))
        .expect("finite steering");
    Case { state, law, radius, n, dt }
}

pub fn run_validation(cases: usize, oracle_steps: usize, seed: u64) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle = IntegrationSettings::Steps(oracle_steps);
    let mut max_scaled_error = 0.0f64;
    for _ in 0..cases {
        let c = random_case(&mut rng, true);
        let ana = propagate_segment(&c.state, &c.law, c.n, c.dt).expect("rate outside the resonance band");
        let num = integrate_numeric(&c.state, &c.law, c.n, c.dt, &oracle);
        max_scaled_error = max_scaled_error.max((ana - num).scaled_norm(c.radius, c.n));
    }
    let zero_thrust_cases = 100;
    let mut zero_thrust_max_error = 0.0f64;
    for _ in 0..zero_thrust_cases {
        let c = random_case(&mut rng, false);
        let ana = propagate_segment(&c.state, &c.law, c.n, c.dt).expect("coasting is never resonant");
        let stm = cw_stm(c.n, c.dt).apply(&c.state);
        zero_thrust_max_error = zero_thrust_max_error.max((ana - stm).scaled_norm(c.radius, c.n));
    }
    ValidationReport { cases, oracle_steps, max_scaled_error, zero_thrust_cases, zero_thrust_max_error }
}
