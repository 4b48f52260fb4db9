use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use cw_seed::analytic::{cw_stm, propagate_segment, RESONANCE_BAND};
use cw_seed::builder::{evaluate_chain, Scenario, ScenarioKind, SegmentParams, Target};
use cw_seed::frames::{
    elements_to_state, hill_to_inertial, inertial_to_hill, recenter_reference, state_to_elements, InertialState,
    KeplerianElements,
};
use cw_seed::hill::{cw_derivative, ControlLaw, HillState, ReferenceOrbit, Triad};
use cw_seed::kepler::solve_kepler;
use cw_seed::oracle::{integrate_numeric, IntegrationSettings};
use cw_seed::performance::{delta_v, mass_at, SpacecraftParams, G0_KM_S2};
use cw_seed::vec3;
use cw_seed::MU_EARTH;

const R: f64 = 7000.0;

fn mean_motion() -> f64 {
    (MU_EARTH / (R * R * R)).sqrt()
}

fn hill_state(scale: f64) -> impl Strategy<Value = HillState<f64>> {
    let n = mean_motion();
    prop::array::uniform6(-1.0f64..1.0).prop_map(move |a| {
        HillState::new(a[0] * scale, a[1] * scale, a[2] * scale, a[3] * scale * n, a[4] * scale * n, a[5] * scale * n)
    })
}

/// Thrusting laws with the rate kept outside the resonance band.
fn law() -> impl Strategy<Value = ControlLaw<f64>> {
    let n = mean_motion();
    (0.0f64..1e-5, -PI..PI, -3.0f64..3.0, -1.5f64..1.5).prop_filter_map("resonant rate", move |(a, al, k, b)| {
        let k = k * n;
        let band = 2.0 * RESONANCE_BAND * n;
        (k.abs() > band && (k.abs() - n).abs() > band).then(|| ControlLaw::new(a, al, k, b).unwrap())
    })
}

fn elements() -> impl Strategy<Value = KeplerianElements<f64>> {
    (6600.0f64..60_000.0, 0.0f64..0.9, 0.01f64..3.1, -PI..PI, -PI..PI, -PI..PI)
        .prop_map(|(a, e, i, o, w, nu)| KeplerianElements::new(a, e, i, o, w, nu).unwrap())
}

fn reference() -> impl Strategy<Value = ReferenceOrbit<f64>> {
    elements().prop_map(|el| {
        let s = elements_to_state(&el, MU_EARTH);
        recenter_reference(&s, MU_EARTH).unwrap().0
    })
}

fn scaled_distance(a: &InertialState<f64>, b: &InertialState<f64>) -> f64 {
    let r = a.radius();
    let n = (MU_EARTH / r.powi(3)).sqrt();
    a.scaled_distance(b, r, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn derivative_is_affine_in_state(s1 in hill_state(50.0), s2 in hill_state(50.0), acc in prop::array::uniform3(-1e-6f64..1e-6)) {
        let n = mean_motion();
        let d = |s: &HillState<f64>| cw_derivative(s, acc, n);
        let lhs = d(&(s1 + s2));
        let rhs = d(&s1) + d(&s2) - d(&HillState::zero());
        let scale = d(&s1).scaled_norm(1.0, 1.0) + d(&s2).scaled_norm(1.0, 1.0) + 1e-300;
        prop_assert!((lhs - rhs).scaled_norm(1.0, 1.0) <= 1e-13 * scale);
    }

    #[test]
    fn out_of_plane_rates_ignore_in_plane_state(s in hill_state(50.0), p in prop::array::uniform4(-10.0f64..10.0), az in -1e-6f64..1e-6) {
        let n = mean_motion();
        let mut t = s;
        t.x += p[0];
        t.y += p[1];
        t.vx += p[2] * 1e-3;
        t.vy += p[3] * 1e-3;
        let (a, b) = (cw_derivative(&s, [0.0, 0.0, az], n), cw_derivative(&t, [0.0, 0.0, az], n));
        prop_assert_eq!(a.z, b.z);
        prop_assert_eq!(a.vz, b.vz);
    }

    #[test]
    fn propagation_is_a_semigroup(s in hill_state(50.0), l in law(), f1 in 0.0f64..1.0, f2 in 0.0f64..1.0) {
        let n = mean_motion();
        let (t1, t2) = (f1 * PI / n, f2 * PI / n);
        let mid = propagate_segment(&s, &l, n, t1).unwrap();
        let two = propagate_segment(&mid, &l.shifted(t1), n, t2).unwrap();
        let one = propagate_segment(&s, &l, n, t1 + t2).unwrap();
        let size = one.scaled_norm(R, n).max(1e-6);
        prop_assert!((two - one).scaled_norm(R, n) <= 1e-10 * size);
    }

    #[test]
    fn zero_thrust_matches_transition_matrix(s in hill_state(100.0), f in 0.0f64..1.0, al in -PI..PI, k in -1e-2f64..1e-2) {
        let n = mean_motion();
        let t = f * TAU / n;
        let l = ControlLaw::new(0.0, al, k, 0.3).unwrap();
        let got = propagate_segment(&s, &l, n, t).unwrap();
        prop_assert!((got - cw_stm(n, t).apply(&s)).scaled_norm(R, n) <= 1e-12);
    }

    #[test]
    fn forced_response_superposes(s1 in hill_state(50.0), s2 in hill_state(50.0), l in law(), f in 0.0f64..1.0) {
        let n = mean_motion();
        let t = f * TAU / n;
        let a = propagate_segment(&s1, &l, n, t).unwrap();
        let b = propagate_segment(&s2, &l, n, t).unwrap();
        let want = cw_stm(n, t).apply(&(s1 - s2));
        prop_assert!(((a - b) - want).scaled_norm(R, n) <= 1e-11);
    }

    #[test]
    fn numeric_without_thrust_matches_transition_matrix(s in hill_state(100.0), f in 0.05f64..1.0) {
        let n = mean_motion();
        let t = f * TAU / n;
        let got = integrate_numeric(&s, &ControlLaw::coast(), n, t, &IntegrationSettings::Steps(2000));
        prop_assert!((got - cw_stm(n, t).apply(&s)).scaled_norm(R, n) <= 1e-9);
    }

    #[test]
    fn elements_state_round_trip(el in elements()) {
        let s = elements_to_state(&el, MU_EARTH);
        let back = elements_to_state(&state_to_elements(&s, MU_EARTH).unwrap(), MU_EARTH);
        prop_assert!(scaled_distance(&s, &back) <= 1e-9);
        let (h1, h2) = (vec3::unit(s.angular_momentum()).unwrap(), vec3::unit(back.angular_momentum()).unwrap());
        prop_assert!(vec3::norm(vec3::sub(h1, h2)) <= 1e-12);
    }

    #[test]
    fn hill_inertial_round_trip(rf in reference(), h in hill_state(100.0), f in 0.0f64..1.0) {
        let t = f * rf.period();
        let s = hill_to_inertial(&h, &rf, t);
        let back = inertial_to_hill(&s, &rf, t);
        let (r, n) = (rf.radius(), rf.mean_motion());
        prop_assert!((back - h).scaled_norm(r, n) <= 1e-9);
    }

    #[test]
    fn recentering_is_the_identity(el in elements(), epoch in 0.0f64..1e6) {
        let mut s = elements_to_state(&el, MU_EARTH);
        s.epoch = epoch;
        let (rf, h) = recenter_reference(&s, MU_EARTH).unwrap();
        let back = hill_to_inertial(&h, &rf, 0.0);
        prop_assert!(scaled_distance(&s, &back) <= 1e-10);
        prop_assert!(vec3::norm(h.position()) <= 1e-10 * s.radius());
    }

    #[test]
    fn kepler_residual_is_tiny(m in -PI..PI, e in 0.0f64..0.95) {
        let ea = solve_kepler(m, e).unwrap();
        prop_assert!((ea - e * ea.sin() - m).abs() <= 1e-12);
    }

    #[test]
    fn mass_is_positive_and_nonincreasing(accel in 0.0f64..1e-5, isp in 200.0f64..5000.0, t1 in 0.0f64..1e8, t2 in 0.0f64..1e8) {
        let p = SpacecraftParams::from_accel(100.0, accel, isp).unwrap();
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        prop_assert!(mass_at(&p, hi) <= mass_at(&p, lo));
        prop_assert!(mass_at(&p, hi) > 0.0);
    }

    #[test]
    fn delta_v_is_additive(a in 0.0f64..1e-5, t1 in 0.0f64..1e7, t2 in 0.0f64..1e7) {
        let whole = delta_v(a, t1 + t2);
        prop_assert!((delta_v(a, t1) + delta_v(a, t2) - whole).abs() <= 1e-12 * whole.max(1e-300));
    }

    #[test]
    fn rocket_equation_holds(a in 1e-8f64..1e-5, isp in 200.0f64..5000.0, t in 1e6f64..3e8) {
        let p = SpacecraftParams::from_accel(100.0, a, isp).unwrap();
        let dv = isp * G0_KM_S2 * (100.0 / mass_at(&p, t)).ln();
        prop_assert!((dv - delta_v(a, t)).abs() <= 1e-12 * delta_v(a, t) * 10.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_agrees_with_oracle(s in hill_state(300.0), l in law(), f in 0.0f64..1.0) {
        let n = mean_motion();
        let t = f * TAU / n;
        let ana = propagate_segment(&s, &l, n, t).unwrap();
        let num = integrate_numeric(&s, &l, n, t, &IntegrationSettings::Steps(20_000));
        prop_assert!((ana - num).scaled_norm(R, n) <= 1e-8);
    }

    #[test]
    fn chains_are_continuous(params in prop::collection::vec((0.0f64..4000.0, -PI..PI, -2e-3f64..2e-3, -0.5f64..0.5), 1..12)) {
        let start = InertialState::new([R, 0.0, 0.0], [0.0, (MU_EARTH / R).sqrt(), 0.1], 0.0).unwrap();
        let params: Vec<_> = params.into_iter().map(|(dt, a, k, b)| SegmentParams::new(dt, a, k, b)).collect();
        let sc = Scenario::new(
            ScenarioKind::Raising,
            MU_EARTH,
            start,
            Target::Sma(8000.0),
            SpacecraftParams::from_accel(100.0, 1e-6, 3000.0).unwrap(),
            params.len(),
            (0.0, 1e6),
        )
        .unwrap();
        let a = evaluate_chain(&sc, &params).unwrap();
        prop_assert!(a.continuity_error() <= 1e-10);
        let total: f64 = params.iter().map(|p| p.dt).sum();
        prop_assert!((a.tof() - total).abs() <= 1e-9 * total.max(1.0));
        prop_assert_eq!(a, evaluate_chain(&sc, &params).unwrap());
    }
}

#[test]
fn triad_of_recentred_reference_is_orthonormal() {
    let el = KeplerianElements::new(9000.0, 0.3, 1.0, 0.5, 0.2, 2.0).unwrap();
    let (rf, _) = recenter_reference(&elements_to_state(&el, MU_EARTH), MU_EARTH).unwrap();
    assert!(rf.triad().orthonormality_error() <= 1e-14);
    assert!(Triad::<f64>::identity().orthonormality_error() == 0.0);
}
