//! Closed-form propagation of the thrust-forced Clohessy-Wiltshire equations
//! over one segment of constant-magnitude, linearly rotating thrust.
//!
//! The solution is split into the homogeneous part (the CW state-transition
//! matrix applied to the initial state) and the forced response from rest.
//! The forced response is the convolution of the transition matrix with the
//! forcing `a·cosβ·(cos θ, sin θ)`, `θ = α₀ + k·τ`. Writing the forcing as the
//! real and imaginary parts of `A·e^{iθ}` reduces every convolution to one of
//! the entire functions
//!
//! ```text
//! E1(z) = ∫₀¹ e^{zu} du,     E2(z) = ∫₀¹ u·e^{zu} du
//! ```
//!
//! evaluated on the imaginary axis, so the expressions carry no `1/k` or
//! `1/(n² − k²)` factors.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hill::{ControlLaw, HillState};
use crate::scalar::Scalar;

/// Relative width of the steering-rate band around `0` and `±n` that
/// [`propagate_in_plane`] refuses.
pub const RESONANCE_BAND: f64 = 1e-6;

/// 6×6 Clohessy-Wiltshire state-transition matrix, state order
/// `(x, y, z, vx, vy, vz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stm<T>(pub [[T; 6]; 6]);

impl<T: Scalar> Stm<T> {
    pub fn apply(&self, state: &HillState<T>) -> HillState<T> {
        let s = state.to_array();
        HillState::from_array(std::array::from_fn(|i| {
            (0..6).fold(T::zero(), |acc, j| acc + self.0[i][j] * s[j])
        }))
    }
}

/// Unforced CW transition matrix for mean motion `n` over `t` seconds.
pub fn cw_stm<T: Scalar>(n: T, t: T) -> Stm<T> {
    let nt = n * t;
    let (s, c) = nt.sin_cos();
    let (z, one) = (T::zero(), T::one());
    let (two, three, four, six) = (T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(6.0));
    let inv_n = one / n;
    Stm([
        [four - three * c, z, z, s * inv_n, two * (one - c) * inv_n, z],
        [six * (s - nt), one, z, -two * (one - c) * inv_n, (four * s - three * nt) * inv_n, z],
        [z, z, c, z, z, s * inv_n],
        [three * n * s, z, z, c, two * s, z],
        [-six * n * (one - c), z, z, -two * s, four * c - three, z],
        [z, z, -n * s, z, z, c],
    ])
}

/// Out-of-plane motion `(z, vz)` after `t` seconds under constant
/// cross-track thrust `a·sin β`.
pub fn propagate_out_of_plane<T: Scalar>(z0: T, vz0: T, a: T, beta: T, n: T, t: T) -> (T, T) {
    let (s, c) = (n * t).sin_cos();
    let az = a * beta.sin();
    let z = z0 * c + vz0 / n * s + az / (n * n) * (T::one() - c);
    let vz = vz0 * c - n * z0 * s + az / n * s;
    (z, vz)
}

/// In-plane motion `(x, vx, y, vy)` after `t` seconds under the steering law.
///
/// Returns [`Error::ResonantSteeringRate`] when the law thrusts and its rate
/// lies within `RESONANCE_BAND·n` of `0` or `±n`.
pub fn propagate_in_plane<T: Scalar>(
    x0: T,
    vx0: T,
    y0: T,
    vy0: T,
    law: &ControlLaw<T>,
    n: T,
    t: T,
) -> Result<(T, T, T, T)> {
    let k = law.alpha_rate();
    if law.accel() > T::zero() {
        let band = T::lit(RESONANCE_BAND) * n;
        if k.abs() < band || (k.abs() - n).abs() < band {
            return Err(Error::ResonantSteeringRate {
                rate: k.as_f64(),
                mean_motion: n.as_f64(),
            });
        }
    }
    let stm = cw_stm(n, t);
    let h = stm.apply(&HillState::new(x0, y0, T::zero(), vx0, vy0, T::zero()));
    let f = forced_in_plane(law, n, t);
    Ok((h.x + f[0], h.vx + f[1], h.y + f[2], h.vy + f[3]))
}

/// Full segment propagation; `dt = 0` returns `state` unchanged.
pub fn propagate_segment<T: Scalar>(
    state: &HillState<T>,
    law: &ControlLaw<T>,
    n: T,
    dt: T,
) -> Result<HillState<T>> {
    if dt == T::zero() {
        return Ok(*state);
    }
    let (x, vx, y, vy) = propagate_in_plane(state.x, state.vx, state.y, state.vy, law, n, dt)?;
    let (z, vz) = propagate_out_of_plane(state.z, state.vz, law.accel(), law.beta(), n, dt);
    Ok(HillState { x, y, z, vx, vy, vz })
}

/// One analytically propagated segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPropagation<T> {
    pub initial: HillState<T>,
    pub law: ControlLaw<T>,
    pub n: T,
    pub dt: T,
    pub final_state: HillState<T>,
}

impl<T: Scalar> SegmentPropagation<T> {
    pub fn compute(initial: HillState<T>, law: ControlLaw<T>, n: T, dt: T) -> Result<Self> {
        if !(dt >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "segment duration must be non-negative, got {dt}"
            )));
        }
        let final_state = propagate_segment(&initial, &law, n, dt)?;
        Ok(Self {
            initial,
            law,
            n,
            dt,
            final_state,
        })
    }

    /// State at `t ∈ [0, dt]` into the segment.
    pub fn state_at(&self, t: T) -> Result<HillState<T>> {
        propagate_segment(&self.initial, &self.law, self.n, t)
    }
}

/// Forced in-plane response from rest: `[x, vx, y, vy]`.
fn forced_in_plane<T: Scalar>(law: &ControlLaw<T>, n: T, t: T) -> [T; 4] {
    let amp = law.accel() * law.beta().cos();
    if amp == T::zero() || t == T::zero() {
        return [T::zero(); 4];
    }
    let k = law.alpha_rate();
    let half = T::lit(0.5);
    // Forcing referenced to the end of the arc: g(t − σ) = G·e^{−ikσ}.
    let g = Complex::from_polar(amp, law.alpha_at(t));

    let plus = e1((n - k) * t);
    let minus = e1(-(n + k) * t);
    let i1 = g * e1(-k * t) * t;
    let i_sigma = g * e2(-k * t) * (t * t);
    let i_cos = g * (plus + minus) * (half * t);
    // (plus − minus) / (2i)
    let diff = plus - minus;
    let i_sin = g * Complex::new(diff.im, -diff.re) * (half * t);

    let (two, three, four) = (T::lit(2.0), T::lit(3.0), T::lit(4.0));
    let inv_n = T::one() / n;
    // 1 − cos(nσ) kernels, formed from the difference of convolutions.
    let one_minus_cos = i1 - i_cos;
    [
        inv_n * (i_sin.re + two * one_minus_cos.im),
        i_cos.re + two * i_sin.im,
        inv_n * (-two * one_minus_cos.re + four * i_sin.im) - three * i_sigma.im,
        -two * i_sin.re + four * i_cos.im - three * i1.im,
    ]
}

/// `E1(iw) = ∫₀¹ e^{iwu} du = sinc(w) + i·(1 − cos w)/w`.
fn e1<T: Scalar>(w: T) -> Complex<T> {
    let half = T::lit(0.5);
    let s = sinc(half * w);
    // (1 − cos w)/w = 2 sin²(w/2)/w = (w/2)·sinc²(w/2)
    Complex::new(sinc(w), half * w * s * s)
}

/// `E2(iw) = ∫₀¹ u·e^{iwu} du`.
fn e2<T: Scalar>(w: T) -> Complex<T> {
    let half = T::lit(0.5);
    let s = sinc(half * w);
    let one_minus_cos_over_w2 = half * s * s;
    // ∫ u cos(wu) = sinc(w) − (1 − cos w)/w²
    let re = sinc(w) - one_minus_cos_over_w2;
    // ∫ u sin(wu) = (sin w − w cos w)/w²
    let im = if w.abs() < half {
        let w2 = w * w;
        let mut term = w;
        let mut sum = T::zero();
        let mut j = 0u32;
        loop {
            let denom = T::lit(f64::from(2 * j + 3));
            let contrib = term / denom;
            sum = sum + contrib;
            if contrib.abs() <= T::epsilon() * sum.abs() || j > 20 {
                break;
            }
            term = -term * w2 / T::lit(f64::from((2 * j + 2) * (2 * j + 3)));
            j += 1;
        }
        sum
    } else {
        let (sw, cw) = w.sin_cos();
        (sw - w * cw) / (w * w)
    };
    Complex::new(re, im)
}

fn sinc<T: Scalar>(w: T) -> T {
    if w.abs() < T::epsilon().sqrt().sqrt() {
        let w2 = w * w;
        T::one() - w2 / T::lit(6.0) + w2 * w2 / T::lit(120.0)
    } else {
        w.sin() / w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{integrate_numeric, IntegrationSettings};
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix6;
    use std::f64::consts::PI;

    fn law(a: f64, alpha0: f64, k: f64, beta: f64) -> ControlLaw<f64> {
        ControlLaw::new(a, alpha0, k, beta).unwrap()
    }

    /// Componentwise relative error with a floor on the reference magnitude.
    fn rel_err(got: &[f64], want: &[f64]) -> f64 {
        let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        got.iter()
            .zip(want)
            .fold(0.0f64, |m, (g, w)| m.max((g - w).abs() / scale))
    }

    #[test]
    fn out_of_plane_half_period() {
        let (z, vz) = propagate_out_of_plane(1.0, 0.0, 0.0, 0.0, 1.0, PI);
        assert_abs_diff_eq!(z, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vz, 0.0, epsilon = 1e-15);

        let (z, vz) = propagate_out_of_plane(0.0, 0.0, 1.0, PI / 2.0, 1.0, PI);
        assert_abs_diff_eq!(z, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vz, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn out_of_plane_matches_oracle() {
        let l = law(1e-3, 0.0, 0.0, 0.4);
        let s0 = HillState::new(0.0, 0.0, 0.3, 0.0, 0.0, -0.1);
        let num = integrate_numeric(&s0, &l, 1.2e-3, 900.0, &IntegrationSettings::Steps(10_000));
        let (z, vz) = propagate_out_of_plane(0.3, -0.1, 1e-3, 0.4, 1.2e-3, 900.0);
        assert!(rel_err(&[z, vz], &[num.z, num.vz]) <= 1e-9);
    }

    #[test]
    fn in_plane_equilibrium() {
        let l = law(0.0, 0.3, 0.0, 0.0);
        let r = propagate_in_plane(0.0, 0.0, 0.0, 0.0, &l, 1e-3, 1234.0).unwrap();
        assert_eq!(r, (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn in_plane_unforced_matches_stm() {
        let l = law(0.0, 0.0, 0.0, 0.0);
        let (x, vx, y, vy) = propagate_in_plane(1.0, 0.0, 0.0, 0.0, &l, 1e-3, 500.0).unwrap();
        let want = cw_stm(1e-3, 500.0).apply(&HillState::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        for (g, w) in [(x, want.x), (vx, want.vx), (y, want.y), (vy, want.vy)] {
            assert_abs_diff_eq!(g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn in_plane_forced_matches_oracle() {
        let l = law(1e-6, 0.7, 2.5e-4, 0.0);
        let (n, t) = (1.16e-3, 2000.0);
        let s0 = HillState::new(0.5, -2.0, 0.0, 1e-4, -5e-4, 0.0);
        let num = integrate_numeric(&s0, &l, n, t, &IntegrationSettings::Steps(100_000));
        let (x, vx, y, vy) = propagate_in_plane(0.5, 1e-4, -2.0, -5e-4, &l, n, t).unwrap();
        let pos = rel_err(&[x, y], &[num.x, num.y]);
        let vel = rel_err(&[vx, vy], &[num.vx, num.vy]);
        assert!(pos <= 1e-9, "position rel err {pos:e}");
        assert!(vel <= 1e-9, "velocity rel err {vel:e}");
    }

    #[test]
    fn resonance_band_is_refused() {
        let n = 1e-3;
        for k in [0.0, 0.5e-9, n, n + 0.5e-9, -n] {
            let l = law(1e-6, 0.0, k, 0.0);
            assert!(matches!(
                propagate_in_plane(0.0, 0.0, 0.0, 0.0, &l, n, 100.0),
                Err(Error::ResonantSteeringRate { .. })
            ));
        }
        // Coasting is never resonant.
        let l = law(0.0, 0.0, n, 0.0);
        assert!(propagate_in_plane(0.0, 0.0, 0.0, 0.0, &l, n, 100.0).is_ok());
    }

    #[test]
    fn forced_response_is_smooth_across_band_edges() {
        // The kernels are entire, so the response just outside the band agrees
        // with the numeric solution as well as a generic rate does.
        let n = 1.1e-3;
        let s0 = HillState::zero();
        for k in [2e-6 * n, n * (1.0 + 2e-6), -n * (1.0 + 2e-6)] {
            let l = law(1e-6, 0.3, k, 0.2);
            let num = integrate_numeric(&s0, &l, n, 3000.0, &IntegrationSettings::Steps(20_000));
            let ana = propagate_segment(&s0, &l, n, 3000.0).unwrap();
            let err = (ana - num).scaled_norm(7000.0, n);
            assert!(err < 1e-12, "k = {k:e}: {err:e}");
        }
    }

    #[test]
    fn segment_identity_at_zero_duration() {
        let s = HillState::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let l = law(1.0, 0.1, 0.0, 0.2);
        assert_eq!(propagate_segment(&s, &l, 1e-3, 0.0).unwrap(), s);
    }

    #[test]
    fn stm_identity_and_unit_determinant() {
        let id = cw_stm(1e-3, 0.0);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(id.0[i][j], if i == j { 1.0 } else { 0.0 });
            }
        }
        for (n, t) in [(1e-3, 3000.0), (1.0, 0.7), (2e-7, 1e7), (0.5, 123.0)] {
            let m = cw_stm(n, t);
            let det = Matrix6::from_fn(|i, j| m.0[i][j]).determinant();
            assert_abs_diff_eq!(det, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn stm_matches_oracle() {
        let s0 = HillState::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let got = cw_stm(1e-3, 3000.0).apply(&s0);
        let num = integrate_numeric(&s0, &ControlLaw::coast(), 1e-3, 3000.0, &IntegrationSettings::Steps(10_000));
        for (g, w) in got.to_array().iter().zip(num.to_array()) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-10);
        }
    }

    #[test]
    fn segment_propagation_record_is_reproducible() {
        let l = law(2e-6, -0.4, 3e-4, 0.1);
        let s0 = HillState::new(0.1, -0.3, 0.05, 1e-4, 2e-4, -1e-5);
        let seg = SegmentPropagation::compute(s0, l, 1.1e-3, 1500.0).unwrap();
        assert_eq!(seg.final_state, propagate_segment(&s0, &l, 1.1e-3, 1500.0).unwrap());
        assert_eq!(seg.state_at(1500.0).unwrap(), seg.final_state);
        assert!(SegmentPropagation::compute(s0, l, 1.1e-3, -1.0).is_err());
    }

    #[test]
    fn kernel_series_matches_closed_form_at_switch() {
        for w in [0.49999, 0.5, 0.50001, -0.49999] {
            let series = e2(w).im;
            let (s, c) = (w as f64).sin_cos();
            let direct = (s - w * c) / (w * w);
            assert_abs_diff_eq!(series, direct, epsilon = 1e-15);
        }
    }

    #[test]
    fn single_precision_segment() {
        let l = ControlLaw::<f32>::new(1e-3, 0.5, 0.3, 0.1).unwrap();
        let s = propagate_segment(&HillState::<f32>::zero(), &l, 1.0, 1.0).unwrap();
        let d = propagate_segment(&HillState::<f64>::zero(), &law(1e-3, 0.5, 0.3, 0.1), 1.0, 1.0)
            .unwrap();
        assert!((f64::from(s.x) - d.x).abs() < 1e-8);
        assert!((f64::from(s.vy) - d.vy).abs() < 1e-8);
    }
}
