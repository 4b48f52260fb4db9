use crate::error::{Error, Result};
use crate::frames::{elements_to_state, state_to_elements, InertialState, KeplerianElements};
use crate::kepler::{mean_to_true, true_to_mean};
use crate::performance::SpacecraftParams;
use crate::vec3;

/// Boundary-condition family of a transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Rendezvous,
    Insertion,
    Phasing,
    Raising,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Rendezvous => "rendezvous",
            Self::Insertion => "insertion",
            Self::Phasing => "phasing",
            Self::Raising => "raising",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// Final semi-major axis only (km).
    Sma(f64),
    /// Final orbit, epoch-free.
    Orbit(KeplerianElements<f64>),
    /// A point moving on these elements, given at scenario time zero.
    Body(KeplerianElements<f64>),
}

impl Target {
    pub fn sma(&self) -> f64 {
        match self {
            Self::Sma(a) => *a,
            Self::Orbit(el) | Self::Body(el) => el.sma,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Central-body gravitational parameter, km³/s².
    pub mu: f64,
    pub start: InertialState<f64>,
    pub target: Target,
    pub spacecraft: SpacecraftParams<f64>,
    /// Number of control segments `m`.
    pub segments: usize,
    /// Admissible total time of flight, seconds.
    pub tof_bounds: (f64, f64),
}

impl Scenario {
    pub fn new(
        kind: ScenarioKind,
        mu: f64,
        start: InertialState<f64>,
        target: Target,
        spacecraft: SpacecraftParams<f64>,
        segments: usize,
        tof_bounds: (f64, f64),
    ) -> Result<Self> {
        let s = Self {
            kind,
            mu,
            start,
            target,
            spacecraft,
            segments,
            tof_bounds,
        };
        s.validate()?;
        Ok(s)
    }

    /// Phasing against a point on the start orbit leading the spacecraft by
    /// `phase` radians of mean anomaly.
    pub fn phasing(
        mu: f64,
        start: KeplerianElements<f64>,
        phase: f64,
        spacecraft: SpacecraftParams<f64>,
        segments: usize,
        tof_bounds: (f64, f64),
    ) -> Result<Self> {
        let m = true_to_mean(start.nu, start.ecc) + phase;
        let body = start.with_true_anomaly(mean_to_true(m, start.ecc)?);
        Self::new(
            ScenarioKind::Phasing,
            mu,
            elements_to_state(&start, mu),
            Target::Body(body),
            spacecraft,
            segments,
            tof_bounds,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidInput(format!("mu must be positive, got {}", self.mu)));
        }
        if self.segments == 0 {
            return Err(Error::InvalidInput("segment count must be at least 1".into()));
        }
        let (lo, hi) = self.tof_bounds;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "time-of-flight bounds must satisfy 0 <= min <= max, got ({lo}, {hi})"
            )));
        }
        if !(self.start.radius() > 0.0) {
            return Err(Error::InvalidInput("start state has zero radius".into()));
        }
        let consistent = matches!(
            (self.kind, &self.target),
            (ScenarioKind::Raising, Target::Sma(_))
                | (ScenarioKind::Insertion, Target::Orbit(_))
                | (ScenarioKind::Rendezvous, Target::Body(_))
                | (ScenarioKind::Phasing, Target::Body(_))
        );
        if !consistent {
            return Err(Error::InvalidInput(format!(
                "{} scenario cannot use target {:?}",
                self.kind.name(),
                self.target
            )));
        }
        if !(self.target.sma() > 0.0) {
            return Err(Error::InvalidInput("target semi-major axis must be positive".into()));
        }
        Ok(())
    }

    /// Number of boundary residuals.
    pub fn residual_count(&self) -> usize {
        match (self.kind, &self.target) {
            (ScenarioKind::Rendezvous, _) => 6,
            (ScenarioKind::Phasing, _) => 3,
            (ScenarioKind::Raising, _) => 1,
            (ScenarioKind::Insertion, Target::Orbit(el)) if el.ecc < super::residuals::CIRCULAR_TARGET_ECC => 5,
            (ScenarioKind::Insertion, _) => 4,
        }
    }

    /// Length used to nondimensionalize position residuals.
    pub fn length_scale(&self) -> f64 {
        self.start.radius()
    }

    /// Circular mean motion at the length scale.
    pub fn reference_rate(&self) -> f64 {
        (self.mu / self.length_scale().powi(3)).sqrt()
    }

    /// Osculating semi-major axis of the start state, or its radius when the
    /// state has no elliptic elements.
    pub fn start_sma(&self) -> f64 {
        state_to_elements(&self.start, self.mu)
            .map(|el| el.sma)
            .unwrap_or_else(|_| self.start.radius())
    }

    pub fn tof_guess(&self) -> f64 {
        0.5 * (self.tof_bounds.0 + self.tof_bounds.1)
    }

    pub fn with_start(&self, start: InertialState<f64>) -> Self {
        Self { start, ..self.clone() }
    }

    /// Whether the transfer moves outwards (target orbit larger than start).
    pub fn is_outward(&self) -> bool {
        match self.kind {
            ScenarioKind::Phasing => false,
            _ => self.target.sma() >= self.start_sma(),
        }
    }

    /// Inclination of the start orbit plane, rad.
    pub fn start_inclination(&self) -> f64 {
        let h = self.start.angular_momentum();
        (h[2] / vec3::norm(h)).clamp(-1.0, 1.0).acos()
    }

    /// Unit normal of the target orbit plane, when the target defines one.
    pub fn target_normal(&self) -> Option<[f64; 3]> {
        match self.target {
            Target::Sma(_) => None,
            Target::Orbit(el) | Target::Body(el) => {
                vec3::unit(elements_to_state(&el, self.mu).angular_momentum())
            }
        }
    }

    /// Rough revolution count of the transfer, used for segment and section
    /// budgeting.
    pub fn estimated_revolutions(&self) -> f64 {
        let r1 = self.start_sma();
        let r2 = self.target.sma();
        let a = self.spacecraft.accel();
        let tau = std::f64::consts::TAU;
        match self.kind {
            ScenarioKind::Raising | ScenarioKind::Insertion if a > 0.0 => {
                // Tangential spiral: dθ = v³/μ dt with dv = −a dt.
                let (v1, v2) = ((self.mu / r1).sqrt(), (self.mu / r2).sqrt());
                (v1.powi(4) - v2.powi(4)).abs() / (4.0 * tau * self.mu * a)
            }
            _ => {
                let n1 = (self.mu / r1.powi(3)).sqrt();
                let n2 = (self.mu / r2.powi(3)).sqrt();
                self.tof_guess() * 0.5 * (n1 + n2) / tau
            }
        }
    }
}

/// Segment budget: 50 segments for few-revolution transfers, otherwise
/// `per_rev` segments per estimated revolution.
pub fn default_segment_count(scenario: &Scenario, per_rev: usize) -> usize {
    let revs = scenario.estimated_revolutions();
    let many = (per_rev as f64 * revs).ceil() as usize;
    if many > 50 && matches!(scenario.kind, ScenarioKind::Raising | ScenarioKind::Insertion) {
        many
    } else {
        50
    }
}

/// Default number of sequential sections: one per 25 estimated revolutions.
pub fn default_section_count(scenario: &Scenario) -> usize {
    match scenario.kind {
        ScenarioKind::Raising | ScenarioKind::Insertion => {
            ((scenario.estimated_revolutions() / 25.0).ceil() as usize).max(1)
        }
        _ => 1,
    }
}

/// Per-segment decision variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentParams {
    /// Segment duration, s.
    pub dt: f64,
    /// Initial in-plane steering angle, rad.
    pub alpha0: f64,
    /// In-plane steering rate, rad/s.
    pub rate: f64,
    /// Out-of-plane steering angle, rad.
    pub beta: f64,
}

impl SegmentParams {
    pub fn new(dt: f64, alpha0: f64, rate: f64, beta: f64) -> Self {
        Self {
            dt,
            alpha0,
            rate,
            beta,
        }
    }
}
