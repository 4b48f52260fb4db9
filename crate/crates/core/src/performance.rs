//! Propellant, mass and ΔV bookkeeping for constant-acceleration thrusting,
//! and revolution counting of sampled trajectories.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::{self, Vec3};

/// Standard gravity, km/s².
pub const G0_KM_S2: f64 = 9.806_65e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacecraftParams<T> {
    m0: T,
    accel: T,
    isp: T,
}

impl<T: Scalar> SpacecraftParams<T> {
    /// From initial mass (kg), thrust acceleration (km/s²) and Isp (s).
    pub fn from_accel(m0: T, accel: T, isp: T) -> Result<Self> {
        if !(m0 > T::zero() && m0.is_finite()) {
            return Err(Error::InvalidInput(format!("initial mass must be positive, got {m0}")));
        }
        if !(isp > T::zero() && isp.is_finite()) {
            return Err(Error::InvalidInput(format!("specific impulse must be positive, got {isp}")));
        }
        if !(accel >= T::zero() && accel.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "thrust acceleration must be non-negative, got {accel}"
            )));
        }
        Ok(Self { m0, accel, isp })
    }

    /// From initial mass (kg), thrust (N) and Isp (s).
    pub fn from_thrust(m0: T, thrust_newton: T, isp: T) -> Result<Self> {
        // N/kg = m/s², stored in km/s².
        Self::from_accel(m0, thrust_newton / m0 * T::lit(1e-3), isp)
    }

    pub fn initial_mass(&self) -> T {
        self.m0
    }

    /// Thrust acceleration, km/s².
    pub fn accel(&self) -> T {
        self.accel
    }

    pub fn isp(&self) -> T {
        self.isp
    }

    /// Initial thrust, N.
    pub fn thrust(&self) -> T {
        self.m0 * self.accel * T::lit(1e3)
    }

    /// Effective exhaust velocity, km/s.
    pub fn exhaust_velocity(&self) -> T {
        self.isp * T::lit(G0_KM_S2)
    }

    pub fn mass_at(&self, burn_time: T) -> T {
        mass_at(self, burn_time)
    }

    pub fn propellant(&self, burn_time: T) -> T {
        self.m0 - self.mass_at(burn_time)
    }
}

/// Mass after `burn_time` seconds of thrusting at constant acceleration.
pub fn mass_at<T: Scalar>(params: &SpacecraftParams<T>, burn_time: T) -> T {
    params.m0 * (-delta_v(params.accel, burn_time) / params.exhaust_velocity()).exp()
}

/// ΔV of always-on thrust at constant acceleration, km/s.
pub fn delta_v<T: Scalar>(accel: T, burn_time: T) -> T {
    accel * burn_time
}

/// Circle-to-circle low-thrust ΔV for coplanar transfers, km/s.
pub fn edelbaum_coplanar<T: Scalar>(mu: T, r1: T, r2: T) -> T {
    ((mu / r1).sqrt() - (mu / r2).sqrt()).abs()
}

/// Revolutions swept by a sequence of inertial positions, measured in the
/// average orbit plane. Consecutive samples must be less than a quarter
/// revolution apart.
pub fn revolutions_from_positions<T: Scalar>(positions: &[Vec3<T>]) -> Result<T> {
    if positions.len() < 2 {
        return Ok(T::zero());
    }
    let mut normal = [T::zero(); 3];
    for w in positions.windows(2) {
        normal = vec3::add(normal, vec3::cross(w[0], w[1]));
    }
    let normal = vec3::unit(normal).ok_or_else(|| {
        Error::InvalidInput("cannot determine an orbit plane from the samples".into())
    })?;
    let project = |p: Vec3<T>| vec3::sub(p, vec3::scale(vec3::dot(p, normal), normal));
    let quarter = T::FRAC_PI_2();
    let mut total = T::zero();
    for w in positions.windows(2) {
        let (a, b) = (project(w[0]), project(w[1]));
        let step = vec3::dot(vec3::cross(a, b), normal).atan2(vec3::dot(a, b));
        if step.abs() > quarter {
            return Err(Error::InsufficientSampling {
                spacing_rev: (step.abs() / T::TAU()).as_f64(),
            });
        }
        total = total + step;
    }
    Ok(total.abs() / T::TAU())
}
