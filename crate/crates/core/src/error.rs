use thiserror::Error;

use crate::builder::TrajectorySolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The steering rate sits inside the band where the closed-form in-plane
    /// solution is not evaluated; callers fall back to numeric propagation.
    #[error("steering rate {rate:e} rad/s is within the resonance band of mean motion {mean_motion:e} rad/s")]
    ResonantSteeringRate { rate: f64, mean_motion: f64 },

    #[error("radius {radius:e} km fell below the singularity limit during integration")]
    SingularRadius { radius: f64 },

    #[error("degenerate orbit: {0}")]
    DegenerateOrbit(String),

    #[error("Kepler's equation did not converge after {iterations} iterations (M = {mean_anomaly}, e = {ecc})")]
    KeplerNonConvergence {
        iterations: usize,
        mean_anomaly: f64,
        ecc: f64,
    },

    #[error("trajectory sampling too coarse: {spacing_rev:.3} rev between samples (limit 0.25)")]
    InsufficientSampling { spacing_rev: f64 },

    #[error("solver did not converge: residual norm {:.3e} after {} iterations", .0.residual_norm, .0.iterations)]
    NoConvergence(Box<TrajectorySolution>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
