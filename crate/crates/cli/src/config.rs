//! Scenario configuration files.
//!
//! Every length and angle carries an explicit unit:
//!
//! ```json
//! { "sma": { "value": 1.5236, "unit": "AU" }, "inc": { "value": 1.85, "unit": "deg" } }
//! ```
//!
//! Bare numbers for such fields and unknown keys are rejected, and every
//! error names the offending key.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use cw_seed::builder::{default_segment_count, Scenario, ScenarioKind, Target};
use cw_seed::frames::{elements_to_state, InertialState, KeplerianElements};
use cw_seed::performance::SpacecraftParams;
use cw_seed::{AU_KM, SECONDS_PER_DAY};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LengthUnit {
    #[serde(rename = "km")]
    Km,
    #[serde(rename = "AU")]
    Au,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AngleUnit {
    #[serde(rename = "rad")]
    Rad,
    #[serde(rename = "deg")]
    Deg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeUnit {
    #[serde(rename = "s")]
    Seconds,
    #[serde(rename = "days")]
    Days,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VelocityUnit {
    #[serde(rename = "km/s")]
    KmPerS,
    #[serde(rename = "m/s")]
    MPerS,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AccelUnit {
    #[serde(rename = "km/s2")]
    KmPerS2,
    #[serde(rename = "m/s2")]
    MPerS2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MuUnit {
    #[serde(rename = "km3/s2")]
    Km3PerS2,
    #[serde(rename = "m3/s2")]
    M3PerS2,
}

/// Conversion into the internal km, rad, s system.
pub trait Unit: Copy {
    fn to_internal(self, v: f64) -> f64;
}

impl Unit for LengthUnit {
    fn to_internal(self, v: f64) -> f64 {
        match self {
            Self::Km => v,
            Self::Au => v * AU_KM,
        }
    }
}

impl Unit for AngleUnit {
    fn to_internal(self, v: f64) -> f64 {
        match self {
            Self::Rad => v,
            Self::Deg => v.to_radians(),
        }
    }
}

impl Unit for TimeUnit {
    fn to_internal(self, v: f64) -> f64 {
        match self {
            Self::Seconds => v,
            Self::Days => v * SECONDS_PER_DAY,
        }
    }
}

impl Unit for VelocityUnit {
    fn to_internal(self, v: f64) -> f64 {
        match self {
            Self::KmPerS => v,
            Self::MPerS => v * 1e-3,
        }
    }
}

impl Unit for AccelUnit {
    fn to_internal(self, v: f64) -> f64 {
        match self {
            Self::KmPerS2 => v,
            Self::MPerS2 => v * 1e-3,
        }
    }
}

impl Unit for MuUnit {
    fn to_internal(self, v: f64) -> f64 {
        match self {
            Self::Km3PerS2 => v,
            Self::M3PerS2 => v * 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, expecting = "an object with `value` and `unit`")]
pub struct Quantity<V, U> {
    pub value: V,
    pub unit: U,
}

impl<U: Unit> Quantity<f64, U> {
    pub fn new(value: f64, unit: U) -> Self {
        Self { value, unit }
    }

    pub fn internal(&self) -> f64 {
        self.unit.to_internal(self.value)
    }
}

impl<U: Unit> Quantity<[f64; 3], U> {
    pub fn internal(&self) -> [f64; 3] {
        self.value.map(|v| self.unit.to_internal(v))
    }
}

pub type Length = Quantity<f64, LengthUnit>;
pub type Angle = Quantity<f64, AngleUnit>;
pub type Time = Quantity<f64, TimeUnit>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindConfig {
    Rendezvous,
    Insertion,
    Phasing,
    Raising,
}

impl From<KindConfig> for ScenarioKind {
    fn from(k: KindConfig) -> Self {
        match k {
            KindConfig::Rendezvous => Self::Rendezvous,
            KindConfig::Insertion => Self::Insertion,
            KindConfig::Phasing => Self::Phasing,
            KindConfig::Raising => Self::Raising,
        }
    }
}

impl From<ScenarioKind> for KindConfig {
    fn from(k: ScenarioKind) -> Self {
        match k {
            ScenarioKind::Rendezvous => Self::Rendezvous,
            ScenarioKind::Insertion => Self::Insertion,
            ScenarioKind::Phasing => Self::Phasing,
            ScenarioKind::Raising => Self::Raising,
        }
    }
}

/// Classical elements. Give exactly one of `argp` and `lon_peri`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementsConfig {
    pub sma: Length,
    pub ecc: f64,
    pub inc: Angle,
    pub raan: Angle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argp: Option<Angle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon_peri: Option<Angle>,
    pub nu: Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub position: Quantity<[f64; 3], LengthUnit>,
    pub velocity: Quantity<[f64; 3], VelocityUnit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StartConfig {
    Elements(ElementsConfig),
    State(StateConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    /// Raising: final semi-major axis.
    Sma(Length),
    /// Insertion: final orbit.
    Orbit(ElementsConfig),
    /// Rendezvous: target body elements at scenario start.
    Body(ElementsConfig),
    /// Phasing: lead angle of a point on the start orbit.
    Phase(Angle),
}

/// Give exactly one of `thrust_n` and `accel`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacecraftConfig {
    pub mass_kg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thrust_n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accel: Option<Quantity<f64, AccelUnit>>,
    pub isp_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentsConfig {
    Count(usize),
    /// Segments per estimated revolution, at least 50 in total.
    PerRev(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TofBoundsConfig {
    pub min: Time,
    pub max: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_steps_per_rev: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_samples_per_segment: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: KindConfig,
    pub mu: Quantity<f64, MuUnit>,
    pub start: StartConfig,
    pub target: TargetConfig,
    pub spacecraft: SpacecraftConfig,
    pub segments: SegmentsConfig,
    pub tof_bounds: TofBoundsConfig,
    #[serde(default, skip_serializing_if = "is_default")]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "is_default")]
    pub output: OutputConfig,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

/// A validated configuration in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub scenario: Scenario,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, CliError> {
    load_config(path).map(|c| c.scenario)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig, CliError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, CliError> {
    let raw: ScenarioConfig = parse_strict(text)?;
    raw.resolve()
}

/// Deserializes with the path of any offending key in the error.
fn parse_strict<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let key = match e.path().to_string() {
            p if p == "." => "<root>".to_string(),
            p => p,
        };
        let inner = e.into_inner();
        match inner.classify() {
            serde_json::error::Category::Data => CliError::Validation { key, message: inner.to_string() },
            _ => CliError::Parse(inner.to_string()),
        }
    })
}

fn invalid(key: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Validation { key: key.to_string(), message: e.to_string() }
}

impl ElementsConfig {
    fn resolve(&self, key: &str) -> Result<KeplerianElements<f64>, CliError> {
        let (sma, inc, raan, nu) = (self.sma.internal(), self.inc.internal(), self.raan.internal(), self.nu.internal());
        let el = match (self.argp, self.lon_peri) {
            (Some(w), None) => KeplerianElements::new(sma, self.ecc, inc, raan, w.internal(), nu),
            (None, Some(lp)) => KeplerianElements::from_longitude_of_periapsis(sma, self.ecc, inc, raan, lp.internal(), nu),
            _ => return Err(invalid(key, "give exactly one of `argp` and `lon_peri`")),
        };
        el.map_err(|e| invalid(key, e))
    }

    /// Elements in km and rad.
    pub fn from_elements(el: &KeplerianElements<f64>) -> Self {
        let rad = |v| Angle::new(v, AngleUnit::Rad);
        Self {
            sma: Length::new(el.sma, LengthUnit::Km),
            ecc: el.ecc,
            inc: rad(el.inc),
            raan: rad(el.raan),
            argp: Some(rad(el.argp)),
            lon_peri: None,
            nu: rad(el.nu),
        }
    }
}

impl ScenarioConfig {
    pub fn resolve(&self) -> Result<LoadedConfig, CliError> {
        let mu = self.mu.internal();
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid("mu", format!("must be positive, got {mu}")));
        }
        let kind = ScenarioKind::from(self.kind);

        let (start, start_elements) = match &self.start {
            StartConfig::Elements(el) => {
                let el = el.resolve("start.elements")?;
                (elements_to_state(&el, mu), Some(el))
            }
            StartConfig::State(s) => {
                let st = InertialState::new(s.position.internal(), s.velocity.internal(), 0.0)
                    .map_err(|e| invalid("start.state", e))?;
                (st, None)
            }
        };

        let target = match (&self.target, kind) {
            (TargetConfig::Sma(a), ScenarioKind::Raising) => Some(Target::Sma(a.internal())),
            (TargetConfig::Orbit(el), ScenarioKind::Insertion) => Some(Target::Orbit(el.resolve("target.orbit")?)),
            (TargetConfig::Body(el), ScenarioKind::Rendezvous | ScenarioKind::Phasing) => {
                Some(Target::Body(el.resolve("target.body")?))
            }
            (TargetConfig::Phase(_), ScenarioKind::Phasing) => None,
            (t, k) => {
                let name = match t {
                    TargetConfig::Sma(_) => "sma",
                    TargetConfig::Orbit(_) => "orbit",
                    TargetConfig::Body(_) => "body",
                    TargetConfig::Phase(_) => "phase",
                };
                return Err(invalid("target", format!("a {} scenario cannot use a `{name}` target", k.name())));
            }
        };

        let sc = &self.spacecraft;
        let spacecraft = match (sc.thrust_n, sc.accel) {
            (Some(t), None) => SpacecraftParams::from_thrust(sc.mass_kg, t, sc.isp_s),
            (None, Some(a)) => SpacecraftParams::from_accel(sc.mass_kg, a.internal(), sc.isp_s),
            _ => return Err(invalid("spacecraft", "give exactly one of `thrust_n` and `accel`")),
        }
        .map_err(|e| invalid("spacecraft", e))?;

        let tof_bounds = (self.tof_bounds.min.internal(), self.tof_bounds.max.internal());
        let (lo, hi) = tof_bounds;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(invalid("tof_bounds", format!("need 0 <= min <= max, got {lo} s and {hi} s")));
        }

        let build = |segments| -> Result<Scenario, CliError> {
            match (target, &self.target, start_elements) {
                (Some(t), _, _) => Scenario::new(kind, mu, start, t, spacecraft, segments, tof_bounds),
                (None, TargetConfig::Phase(phase), Some(el)) => {
                    Scenario::phasing(mu, el, phase.internal(), spacecraft, segments, tof_bounds)
                }
                _ => return Err(invalid("target.phase", "phasing needs the start given as `elements`")),
            }
            .map_err(|e| invalid("<root>", e))
        };
        let scenario = match self.segments {
            SegmentsConfig::Count(0) | SegmentsConfig::PerRev(0) => {
                return Err(invalid("segments", "must be at least 1"));
            }
            SegmentsConfig::Count(m) => build(m)?,
            SegmentsConfig::PerRev(k) => {
                let mut s = build(1)?;
                s.segments = default_segment_count(&s, k);
                s
            }
        };

        if self.solver.sections == Some(0) {
            return Err(invalid("solver.sections", "must be at least 1"));
        }
        if let Some(tol) = self.solver.tol {
            if !(tol > 0.0) {
                return Err(invalid("solver.tol", format!("must be positive, got {tol}")));
            }
        }
        if self.output.seed_steps_per_rev == Some(0) {
            return Err(invalid("output.seed_steps_per_rev", "must be at least 1"));
        }
        if self.output.control_samples_per_segment == Some(0) {
            return Err(invalid("output.control_samples_per_segment", "must be at least 1"));
        }

        Ok(LoadedConfig { scenario, solver: self.solver, output: self.output.clone() })
    }

    /// Canonical configuration in km, rad and s that loads back to the same
    /// scenario.
    pub fn from_loaded(cfg: &LoadedConfig) -> Self {
        let s = &cfg.scenario;
        let target = match s.target {
            Target::Sma(a) => TargetConfig::Sma(Length::new(a, LengthUnit::Km)),
            Target::Orbit(el) => TargetConfig::Orbit(ElementsConfig::from_elements(&el)),
            Target::Body(el) => TargetConfig::Body(ElementsConfig::from_elements(&el)),
        };
        let secs = |v| Time::new(v, TimeUnit::Seconds);
        Self {
            kind: s.kind.into(),
            mu: Quantity::new(s.mu, MuUnit::Km3PerS2),
            start: StartConfig::State(StateConfig {
                position: Quantity { value: s.start.pos, unit: LengthUnit::Km },
                velocity: Quantity { value: s.start.vel, unit: VelocityUnit::KmPerS },
            }),
            target,
            spacecraft: SpacecraftConfig {
                mass_kg: s.spacecraft.initial_mass(),
                thrust_n: None,
                accel: Some(Quantity::new(s.spacecraft.accel(), AccelUnit::KmPerS2)),
                isp_s: s.spacecraft.isp(),
            },
            segments: SegmentsConfig::Count(s.segments),
            tof_bounds: TofBoundsConfig { min: secs(s.tof_bounds.0), max: secs(s.tof_bounds.1) },
            solver: cfg.solver,
            output: cfg.output.clone(),
        }
    }
}

pub fn write_config(cfg: &LoadedConfig, path: impl AsRef<Path>) -> Result<(), CliError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&ScenarioConfig::from_loaded(cfg)).expect("config serializes");
    fs::write(path, text + "\n").map_err(|source| CliError::Write { path: path.display().to_string(), source })
}
