//! Kepler's equation and anomaly conversions for elliptic orbits.

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Scalar};

pub const MAX_ITERATIONS: usize = 100;

/// Solves `E − e·sin E = M` for the eccentric anomaly.
///
/// Newton iteration on the bracket `[-π, π]` of the reduced mean anomaly,
/// falling back to bisection whenever a Newton step leaves the bracket. The
/// returned `E` lies in the same revolution as `M`.
pub fn solve_kepler<T: Scalar>(mean_anomaly: T, ecc: T) -> Result<T> {
    if !(ecc >= T::zero() && ecc < T::one()) || !mean_anomaly.is_finite() {
        return Err(Error::InvalidInput(format!(
            "Kepler solver needs 0 <= e < 1 and finite M, got e = {ecc}, M = {mean_anomaly}"
        )));
    }
    let reduced = wrap_angle(mean_anomaly);
    let offset = mean_anomaly - reduced;
    if ecc == T::zero() || reduced == T::zero() {
        return Ok(mean_anomaly);
    }

    let f = |e_anom: T| e_anom - ecc * e_anom.sin() - reduced;
    let (mut lo, mut hi) = (-T::PI(), T::PI());
    let mut e_anom = if ecc < T::lit(0.8) {
        reduced
    } else {
        T::PI().copysign(reduced)
    };
    let tol = T::epsilon() * T::lit(4.0);
    for _ in 0..MAX_ITERATIONS {
        let fe = f(e_anom);
        if fe.abs() <= tol {
            return Ok(e_anom + offset);
        }
        if fe > T::zero() {
            hi = e_anom;
        } else {
            lo = e_anom;
        }
        let step = fe / (T::one() - ecc * e_anom.cos());
        let mut next = e_anom - step;
        if !(next > lo && next < hi) {
            next = T::lit(0.5) * (lo + hi);
        }
        if next == e_anom || hi - lo <= tol {
            return Ok(next + offset);
        }
        e_anom = next;
    }
    Err(Error::KeplerNonConvergence {
        iterations: MAX_ITERATIONS,
        mean_anomaly: mean_anomaly.as_f64(),
        ecc: ecc.as_f64(),
    })
}

pub fn eccentric_to_true<T: Scalar>(e_anom: T, ecc: T) -> T {
    let (s, c) = (T::lit(0.5) * e_anom).sin_cos();
    T::lit(2.0) * ((T::one() + ecc).sqrt() * s).atan2((T::one() - ecc).sqrt() * c)
}

pub fn true_to_eccentric<T: Scalar>(nu: T, ecc: T) -> T {
    let (s, c) = (T::lit(0.5) * nu).sin_cos();
    T::lit(2.0) * ((T::one() - ecc).sqrt() * s).atan2((T::one() + ecc).sqrt() * c)
}

pub fn true_to_mean<T: Scalar>(nu: T, ecc: T) -> T {
    let e_anom = true_to_eccentric(nu, ecc);
    e_anom - ecc * e_anom.sin()
}

pub fn mean_to_true<T: Scalar>(mean_anomaly: T, ecc: T) -> Result<T> {
    Ok(eccentric_to_true(solve_kepler(mean_anomaly, ecc)?, ecc))
}
