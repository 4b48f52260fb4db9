//! Hill-frame state, thrust steering law and the thrust-forced
//! Clohessy-Wiltshire equations of relative motion.
//!
//! Axes: `x` radial, `y` along-track, `z` cross-track, all measured from a
//! reference point on a circular orbit. Units are km, km/s, km/s², rad and s.

use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Scalar};
use crate::vec3::{self, Vec3};

/// Relative position and velocity in the rotating Hill frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillState<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub vx: T,
    pub vy: T,
    pub vz: T,
}

impl<T: Scalar> HillState<T> {
    pub fn new(x: T, y: T, z: T, vx: T, vy: T, vz: T) -> Self {
        Self { x, y, z, vx, vy, vz }
    }

    pub fn zero() -> Self {
        Self::from_array([T::zero(); 6])
    }

    pub fn from_array(a: [T; 6]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn to_array(self) -> [T; 6] {
        [self.x, self.y, self.z, self.vx, self.vy, self.vz]
    }

    pub fn position(&self) -> Vec3<T> {
        [self.x, self.y, self.z]
    }

    pub fn velocity(&self) -> Vec3<T> {
        [self.vx, self.vy, self.vz]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    pub fn scaled(self, s: T) -> Self {
        Self::from_array(self.to_array().map(|c| c * s))
    }

    /// Error norm with positions divided by `length` and velocities by
    /// `length · n`, so one tolerance applies in LEO and heliocentric regimes.
    pub fn scaled_norm(&self, length: T, n: T) -> T {
        let vel_scale = length * n;
        let a = self.to_array();
        let mut sum = T::zero();
        for (i, c) in a.iter().enumerate() {
            let s = if i < 3 { *c / length } else { *c / vel_scale };
            sum = sum + s * s;
        }
        sum.sqrt()
    }
}

impl<T: Scalar> Add for HillState<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl<T: Scalar> Sub for HillState<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| a[i] - b[i]))
    }
}

/// Constant-magnitude thrust acceleration with a linearly rotating in-plane
/// steering angle `alpha(t) = alpha0 + alpha_rate·t` and a fixed out-of-plane
/// angle `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlLaw<T> {
    accel: T,
    alpha0: T,
    alpha_rate: T,
    beta: T,
}

impl<T: Scalar> ControlLaw<T> {
    /// Builds a law, normalizing `alpha0` into `(-π, π]` and folding `beta`
    /// into `[-π/2, π/2]` (a fold flips the in-plane direction by π, which
    /// leaves the thrust vector unchanged).
    pub fn new(accel: T, alpha0: T, alpha_rate: T, beta: T) -> Result<Self> {
        if !(accel.is_finite() && alpha0.is_finite() && alpha_rate.is_finite() && beta.is_finite())
        {
            return Err(Error::InvalidInput("control law has non-finite field".into()));
        }
        if accel < T::zero() {
            return Err(Error::InvalidInput(format!(
                "thrust acceleration must be non-negative, got {}",
                accel
            )));
        }
        let half_pi = T::FRAC_PI_2();
        let mut beta = wrap_angle(beta);
        let mut alpha0 = alpha0;
        if beta > half_pi {
            beta = T::PI() - beta;
            alpha0 = alpha0 + T::PI();
        } else if beta < -half_pi {
            beta = -T::PI() - beta;
            alpha0 = alpha0 + T::PI();
        }
        Ok(Self {
            accel,
            alpha0: wrap_angle(alpha0),
            alpha_rate,
            beta,
        })
    }

    /// Law with zero thrust.
    pub fn coast() -> Self {
        Self {
            accel: T::zero(),
            alpha0: T::zero(),
            alpha_rate: T::zero(),
            beta: T::zero(),
        }
    }

    pub fn accel(&self) -> T {
        self.accel
    }

    pub fn alpha0(&self) -> T {
        self.alpha0
    }

    pub fn alpha_rate(&self) -> T {
        self.alpha_rate
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// In-plane steering angle at time `t` into the segment (not wrapped).
    pub fn alpha_at(&self, t: T) -> T {
        self.alpha0 + self.alpha_rate * t
    }

    /// The same law re-referenced to start `t` seconds later.
    pub fn shifted(&self, t: T) -> Self {
        Self {
            alpha0: wrap_angle(self.alpha_at(t)),
            ..*self
        }
    }
}

/// Thrust acceleration components `(ax, ay, az)` in the Hill frame at time `t`.
pub fn thrust_components<T: Scalar>(law: &ControlLaw<T>, t: T) -> Vec3<T> {
    let (sa, ca) = law.alpha_at(t).sin_cos();
    let (sb, cb) = law.beta.sin_cos();
    [
        law.accel * cb * ca,
        law.accel * cb * sa,
        law.accel * sb,
    ]
}

/// Right-hand side of the thrust-forced Clohessy-Wiltshire equations.
pub fn cw_derivative<T: Scalar>(state: &HillState<T>, accel: Vec3<T>, n: T) -> HillState<T> {
    let two = T::lit(2.0);
    let n2 = n * n;
    HillState {
        x: state.vx,
        y: state.vy,
        z: state.vz,
        vx: T::lit(3.0) * state.x * n2 + two * state.vy * n + accel[0],
        vy: -two * n * state.vx + accel[1],
        vz: -state.z * n2 + accel[2],
    }
}

/// Right-handed orthonormal triad fixing a reference orbit: the radial
/// direction of the reference point at the orbit epoch, the along-track
/// direction at that epoch, and the orbit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triad<T> {
    pub radial: Vec3<T>,
    pub along: Vec3<T>,
    pub normal: Vec3<T>,
}

impl<T: Scalar> Triad<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            radial: [o, z, z],
            along: [z, o, z],
            normal: [z, z, o],
        }
    }

    /// Largest deviation from orthonormality and right-handedness.
    pub fn orthonormality_error(&self) -> T {
        let axes = [self.radial, self.along, self.normal];
        let mut err = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { T::one() } else { T::zero() };
                err = err.max((vec3::dot(axes[i], axes[j]) - expect).abs());
            }
        }
        let handed = vec3::sub(vec3::cross(self.radial, self.along), self.normal);
        err.max(vec3::norm(handed))
    }

    /// Hill-frame radial and along-track unit vectors after the reference
    /// point has advanced by `angle` along its orbit.
    pub fn rotated(&self, angle: T) -> (Vec3<T>, Vec3<T>) {
        let (s, c) = angle.sin_cos();
        let radial = vec3::add(vec3::scale(c, self.radial), vec3::scale(s, self.along));
        let along = vec3::sub(vec3::scale(c, self.along), vec3::scale(s, self.radial));
        (radial, along)
    }
}

/// Circular reference orbit that defines a Hill frame.
///
/// The mean motion is always derived from `mu` and `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOrbit<T> {
    mu: T,
    radius: T,
    n: T,
    triad: Triad<T>,
    epoch: T,
}

impl<T: Scalar> ReferenceOrbit<T> {
    /// `epoch` is the time (seconds past scenario start) at which the
    /// reference point lies along `triad.radial`.
    pub fn new(mu: T, radius: T, triad: Triad<T>, epoch: T) -> Result<Self> {
        if !(mu > T::zero() && mu.is_finite()) {
            return Err(Error::InvalidInput(format!("mu must be positive, got {mu}")));
        }
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "reference radius must be positive, got {radius}"
            )));
        }
        let err = triad.orthonormality_error();
        if !(err <= T::structural_tol()) {
            return Err(Error::InvalidInput(format!(
                "reference triad is not orthonormal (error {err:e})"
            )));
        }
        Ok(Self {
            mu,
            radius,
            n: (mu / (radius * radius * radius)).sqrt(),
            triad,
            epoch,
        })
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn mean_motion(&self) -> T {
        self.n
    }

    pub fn triad(&self) -> &Triad<T> {
        &self.triad
    }

    pub fn epoch(&self) -> T {
        self.epoch
    }

    pub fn period(&self) -> T {
        T::TAU() / self.n
    }

    pub fn circular_speed(&self) -> T {
        self.n * self.radius
    }
}
