//! Initial-guess low-thrust trajectories from chained, thrust-forced
//! Clohessy-Wiltshire arcs.
//!
//! The dynamics, propagators, frames and performance helpers are generic over
//! the floating-point type; the trajectory builder works in `f64`.

pub mod analytic;
pub mod builder;
pub mod error;
pub mod frames;
pub mod hill;
pub mod kepler;
pub mod oracle;
pub mod performance;
pub mod scalar;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Gravitational parameter of the Earth, km³/s².
pub const MU_EARTH: f64 = 398_600.441_8;
/// Gravitational parameter of the Sun, km³/s².
pub const MU_SUN: f64 = 1.327_124_400_18e11;
/// Astronomical unit, km.
pub const AU_KM: f64 = 1.495_978_707e8;
/// Equatorial radius of the Earth, km.
pub const EARTH_RADIUS_KM: f64 = 6378.137;
pub const SECONDS_PER_DAY: f64 = 86_400.0;

pub type HillState64 = hill::HillState<f64>;
pub type HillState32 = hill::HillState<f32>;
pub type ControlLaw64 = hill::ControlLaw<f64>;
pub type ControlLaw32 = hill::ControlLaw<f32>;
pub type ReferenceOrbit64 = hill::ReferenceOrbit<f64>;
pub type ReferenceOrbit32 = hill::ReferenceOrbit<f32>;
pub type KeplerianElements64 = frames::KeplerianElements<f64>;
pub type KeplerianElements32 = frames::KeplerianElements<f32>;
pub type InertialState64 = frames::InertialState<f64>;
pub type InertialState32 = frames::InertialState<f32>;
pub type SpacecraftParams64 = performance::SpacecraftParams<f64>;
pub type SpacecraftParams32 = performance::SpacecraftParams<f32>;
