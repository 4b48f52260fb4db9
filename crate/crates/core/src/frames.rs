//! Inertial states, Keplerian elements and the Hill frame of a circular
//! reference orbit.

use crate::error::{Error, Result};
use crate::hill::{HillState, ReferenceOrbit, Triad};
use crate::kepler::{mean_to_true, true_to_mean};
use crate::scalar::{wrap_angle, Scalar};
use crate::vec3::{self, Vec3};

/// Below this inclination the node is undefined and placed on the x axis.
pub const NODE_FALLBACK_INC: f64 = 1e-8;
/// Below this eccentricity the periapsis is undefined and placed at the node.
pub const CIRCULAR_ECC: f64 = 1e-11;

/// Classical elements of an elliptic orbit (km, rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerianElements<T> {
    pub sma: T,
    pub ecc: T,
    pub inc: T,
    pub raan: T,
    pub argp: T,
    pub nu: T,
}

impl<T: Scalar> KeplerianElements<T> {
    /// Validates the elliptic domain and normalizes angles to `(-π, π]`.
    pub fn new(sma: T, ecc: T, inc: T, raan: T, argp: T, nu: T) -> Result<Self> {
        if !(sma > T::zero() && sma.is_finite()) {
            return Err(Error::InvalidInput(format!("semi-major axis must be positive, got {sma}")));
        }
        if !(ecc >= T::zero() && ecc < T::one()) {
            return Err(Error::InvalidInput(format!("eccentricity must lie in [0, 1), got {ecc}")));
        }
        for (name, v) in [("inclination", inc), ("raan", raan), ("argp", argp), ("nu", nu)] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite")));
            }
        }
        Ok(Self {
            sma,
            ecc,
            inc: wrap_angle(inc),
            raan: wrap_angle(raan),
            argp: wrap_angle(argp),
            nu: wrap_angle(nu),
        })
    }

    /// Builds elements from a longitude of periapsis `ϖ = Ω + ω`.
    pub fn from_longitude_of_periapsis(sma: T, ecc: T, inc: T, raan: T, lon_peri: T, nu: T) -> Result<Self> {
        Self::new(sma, ecc, inc, raan, lon_peri - raan, nu)
    }

    pub fn mean_motion(&self, mu: T) -> T {
        (mu / (self.sma * self.sma * self.sma)).sqrt()
    }

    pub fn period(&self, mu: T) -> T {
        T::TAU() / self.mean_motion(mu)
    }

    pub fn periapsis(&self) -> T {
        self.sma * (T::one() - self.ecc)
    }

    pub fn apoapsis(&self) -> T {
        self.sma * (T::one() + self.ecc)
    }

    /// The same orbit with the true anomaly replaced by `nu`.
    pub fn with_true_anomaly(&self, nu: T) -> Self {
        Self { nu: wrap_angle(nu), ..*self }
    }
}

/// Cartesian position/velocity in the inertial frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialState<T> {
    pub pos: Vec3<T>,
    pub vel: Vec3<T>,
    /// Seconds past scenario start.
    pub epoch: T,
}

impl<T: Scalar> InertialState<T> {
    pub fn new(pos: Vec3<T>, vel: Vec3<T>, epoch: T) -> Result<Self> {
        let r = vec3::norm(pos);
        if !(r > T::zero() && r.is_finite()) || !vel.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("inertial state needs a finite, non-zero position".into()));
        }
        Ok(Self { pos, vel, epoch })
    }

    pub fn radius(&self) -> T {
        vec3::norm(self.pos)
    }

    pub fn speed(&self) -> T {
        vec3::norm(self.vel)
    }

    pub fn angular_momentum(&self) -> Vec3<T> {
        vec3::cross(self.pos, self.vel)
    }

    pub fn energy(&self, mu: T) -> T {
        T::lit(0.5) * vec3::dot(self.vel, self.vel) - mu / self.radius()
    }

    /// Position error over `length` plus velocity error over `length·n`.
    pub fn scaled_distance(&self, other: &Self, length: T, n: T) -> T {
        let dp = vec3::norm(vec3::sub(self.pos, other.pos)) / length;
        let dv = vec3::norm(vec3::sub(self.vel, other.vel)) / (length * n);
        (dp * dp + dv * dv).sqrt()
    }
}

/// Orientation triad `(P, Q, W)` of the perifocal frame.
fn perifocal_axes<T: Scalar>(el: &KeplerianElements<T>) -> (Vec3<T>, Vec3<T>, Vec3<T>) {
    let (so, co) = el.raan.sin_cos();
    let (si, ci) = el.inc.sin_cos();
    let (sw, cw) = el.argp.sin_cos();
    let p = [co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si];
    let q = [-co * sw - so * cw * ci, -so * sw + co * cw * ci, cw * si];
    let w = [so * si, -co * si, ci];
    (p, q, w)
}

/// Two-body conversion from elements to an inertial state at epoch 0.
pub fn elements_to_state<T: Scalar>(el: &KeplerianElements<T>, mu: T) -> InertialState<T> {
    let one = T::one();
    let p = el.sma * (one - el.ecc * el.ecc);
    let (sn, cn) = el.nu.sin_cos();
    let r = p / (one + el.ecc * cn);
    let vf = (mu / p).sqrt();
    let (px, qx, _) = perifocal_axes(el);
    let pos = vec3::add(vec3::scale(r * cn, px), vec3::scale(r * sn, qx));
    let vel = vec3::add(vec3::scale(-vf * sn, px), vec3::scale(vf * (el.ecc + cn), qx));
    InertialState { pos, vel, epoch: T::zero() }
}

/// Inverse of [`elements_to_state`].
pub fn state_to_elements<T: Scalar>(s: &InertialState<T>, mu: T) -> Result<KeplerianElements<T>> {
    let r = s.radius();
    let v = s.speed();
    let h = s.angular_momentum();
    let hn = vec3::norm(h);
    if !(hn > T::lit(1e-9) * r * v) {
        return Err(Error::DegenerateOrbit("rectilinear state".into()));
    }
    let energy = s.energy(mu);
    if !(energy < T::zero()) {
        return Err(Error::DegenerateOrbit("state is not bound (parabolic or hyperbolic)".into()));
    }
    let rv = vec3::dot(s.pos, s.vel);
    let e_vec = vec3::scale(
        T::one() / mu,
        vec3::sub(vec3::scale(v * v - mu / r, s.pos), vec3::scale(rv, s.vel)),
    );
    let ecc = vec3::norm(e_vec);
    if !(ecc < T::one() - T::lit(1e-9)) {
        return Err(Error::DegenerateOrbit(format!("eccentricity {ecc} is not elliptic")));
    }
    let sma = -mu / (T::lit(2.0) * energy);
    let w = vec3::scale(T::one() / hn, h);
    let inc = (w[0] * w[0] + w[1] * w[1]).sqrt().atan2(w[2]);
    let raan = if inc.sin() < T::lit(NODE_FALLBACK_INC) {
        T::zero()
    } else {
        w[0].atan2(-w[1])
    };
    let (so, co) = raan.sin_cos();
    let node = [co, so, T::zero()];
    let in_plane_angle = |from: Vec3<T>, to: Vec3<T>| vec3::dot(vec3::cross(from, to), w).atan2(vec3::dot(from, to));
    let (argp, nu) = if ecc < T::lit(CIRCULAR_ECC) {
        (T::zero(), in_plane_angle(node, s.pos))
    } else {
        (in_plane_angle(node, e_vec), in_plane_angle(e_vec, s.pos))
    };
    KeplerianElements::new(sma, ecc, inc, raan, argp, nu)
}

/// Advances the orbit by `dt` seconds of two-body motion.
pub fn propagate_target<T: Scalar>(el: &KeplerianElements<T>, mu: T, dt: T) -> Result<InertialState<T>> {
    let m = true_to_mean(el.nu, el.ecc) + el.mean_motion(mu) * dt;
    let nu = mean_to_true(m, el.ecc)?;
    let mut s = elements_to_state(&el.with_true_anomaly(nu), mu);
    s.epoch = dt;
    Ok(s)
}

/// Hill state relative to `reference`, `t` seconds after its epoch, mapped
/// to an inertial state.
pub fn hill_to_inertial<T: Scalar>(h: &HillState<T>, reference: &ReferenceOrbit<T>, t: T) -> InertialState<T> {
    let n = reference.mean_motion();
    let (xh, yh) = reference.triad().rotated(n * t);
    let zh = reference.triad().normal;
    let rx = reference.radius() + h.x;
    let pos = vec3::combine(rx, xh, h.y, yh, h.z, zh);
    let vel = vec3::combine(h.vx - n * h.y, xh, h.vy + n * rx, yh, h.vz, zh);
    InertialState {
        pos,
        vel,
        epoch: reference.epoch() + t,
    }
}

/// Inverse of [`hill_to_inertial`].
pub fn inertial_to_hill<T: Scalar>(s: &InertialState<T>, reference: &ReferenceOrbit<T>, t: T) -> HillState<T> {
    let n = reference.mean_motion();
    let (xh, yh) = reference.triad().rotated(n * t);
    let zh = reference.triad().normal;
    let x = vec3::dot(s.pos, xh) - reference.radius();
    let y = vec3::dot(s.pos, yh);
    let z = vec3::dot(s.pos, zh);
    HillState {
        x,
        y,
        z,
        vx: vec3::dot(s.vel, xh) + n * y,
        vy: vec3::dot(s.vel, yh) - n * (reference.radius() + x),
        vz: vec3::dot(s.vel, zh),
    }
}

/// Circular reference orbit through the current position, in the plane of
/// the current motion, with the reference point at the spacecraft.
///
/// The returned Hill state has zero position and the velocity excess over
/// local circular velocity.
pub fn recenter_reference<T: Scalar>(s: &InertialState<T>, mu: T) -> Result<(ReferenceOrbit<T>, HillState<T>)> {
    let r = s.radius();
    let h = s.angular_momentum();
    let hn = vec3::norm(h);
    if !(hn > T::lit(1e-9) * r * s.speed()) {
        return Err(Error::DegenerateOrbit("cannot define a reference plane for a rectilinear state".into()));
    }
    let radial = vec3::scale(T::one() / r, s.pos);
    let normal = vec3::scale(T::one() / hn, h);
    let along = vec3::cross(normal, radial);
    let reference = ReferenceOrbit::new(mu, r, Triad { radial, along, normal }, s.epoch)?;
    let hill = HillState {
        x: T::zero(),
        y: T::zero(),
        z: T::zero(),
        vx: vec3::dot(s.vel, radial),
        vy: vec3::dot(s.vel, along) - reference.circular_speed(),
        vz: vec3::dot(s.vel, normal),
    };
    Ok((reference, hill))
}
