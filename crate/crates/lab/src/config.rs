//! Experiment configuration: a TOML file with one table per concern. Every
//! field has a default, so an empty file (or no file) is a valid config.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use coupled_obs::{PhysicalParams, SpectralDomain};
use serde::{Deserialize, Serialize};

/// A config problem pinned to the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainShape {
    Interval,
    Rectangle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: DomainShape,
    pub lx: f64,
    pub ly: f64,
    /// Cells along x.
    pub cells: usize,
    /// Cells along y (rectangles only).
    pub cells_y: usize,
    pub n_modes: usize,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { kind: DomainShape::Interval, lx: PI, ly: PI, cells: 256, cells_y: 48, n_modes: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub a: f64,
    pub b: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub horizon: f64,
    pub n_time: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { horizon: 1.0, n_time: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetGenerator {
    /// The whole cylinder.
    Full,
    /// The first half of the time window over the whole domain.
    FirstHalf,
    /// Random union of boxes.
    Random,
    /// Run-length encoded mask read from `fixture`.
    Fixture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObservationConfig {
    pub generator: SetGenerator,
    pub min_fraction: f64,
    pub keep: f64,
    pub seed: u64,
    pub fixture: Option<PathBuf>,
}

impl Default for ObservationConfig {
    fn default() -> Self {
        Self { generator: SetGenerator::Random, min_fraction: 0.25, keep: 1.0, seed: 1, fixture: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectorKind {
    First,
    Direction,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectorConfig {
    pub kind: SelectorKind,
    pub mu1: f64,
    pub mu2: f64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self { kind: SelectorKind::First, mu1: 1.0, mu2: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// `pair · e_mode`.
    Mode,
    /// Seeded random unit state.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateConfig {
    pub kind: StateKind,
    /// Zero-based mode index.
    pub mode: usize,
    pub pair: [f64; 2],
}

impl Default for StateConfig {
    fn default() -> Self {
        Self { kind: StateKind::Mode, mode: 0, pair: [1.0, 0.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterpConfig {
    pub theta: f64,
    pub beta: f64,
    pub s1: f64,
    pub s2: f64,
    /// Random states per check.
    pub batch: usize,
    /// Telescope rings.
    pub depth: usize,
    pub pi1: f64,
    /// Frequency for the spectral `L¹` constant.
    pub lambda: f64,
    pub restarts: usize,
}

impl Default for InterpConfig {
    fn default() -> Self {
        Self { theta: 0.5, beta: 1.0, s1: 0.05, s2: 1.0, batch: 16, depth: 6, pi1: 1.0, lambda: 5.0, restarts: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    /// Zero-based mode of the single-time state.
    pub mode: usize,
    /// Vanishing time of the single-time state.
    pub s: f64,
    /// Number of vanishing times of the multi-time state.
    pub multi: usize,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self { mode: 2, s: 0.5, multi: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    Full,
    LeftHalf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlConfig {
    pub nu1: f64,
    pub nu2: f64,
    pub radius: f64,
    pub tol: f64,
    pub t_max: f64,
    /// Time cells of the time-optimal discretization.
    pub n_time: usize,
    pub omega: RegionKind,
    /// Truncation used by the control problems (capped at `domain.n_modes`).
    pub modes: usize,
    pub l_restarts: usize,
    pub max_iter: usize,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            nu1: -0.3,
            nu2: 0.3,
            radius: 0.3,
            tol: 1e-2,
            t_max: 2.0,
            n_time: 16,
            omega: RegionKind::Full,
            modes: 8,
            l_restarts: 16,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub remez_cases: usize,
    pub sine_cases: usize,
    pub geometry_cases: usize,
    pub triples: usize,
    pub probes: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { remez_cases: 10_000, sine_cases: 10_000, geometry_cases: 1_000, triples: 100, probes: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub domain: DomainConfig,
    pub params: ParamsConfig,
    pub time: TimeConfig,
    pub observation: ObservationConfig,
    pub selector: SelectorConfig,
    pub state: StateConfig,
    pub interp: InterpConfig,
    pub counterexample: CounterexampleConfig,
    pub control: ControlConfig,
    pub sweep: SweepConfig,
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be positive and finite, got {v}")))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<(), ConfigError> {
    if v >= min {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be at least {min}, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| text[s].lines().next().unwrap_or("").trim().to_string()).unwrap_or_default();
            ConfigError::new(if field.is_empty() { "config" } else { &field }, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let d = &self.domain;
        positive("domain.lx", d.lx)?;
        positive("domain.ly", d.ly)?;
        at_least("domain.cells", d.cells, 2)?;
        at_least("domain.n_modes", d.n_modes, 1)?;
        if d.kind == DomainShape::Rectangle {
            at_least("domain.cells_y", d.cells_y, 2)?;
        }
        positive("params.a", self.params.a)?;
        if !(self.params.b != 0.0 && self.params.b.is_finite()) {
            return Err(ConfigError::new("params.b", format!("must be nonzero and finite, got {}", self.params.b)));
        }
        positive("time.horizon", self.time.horizon)?;
        at_least("time.n_time", self.time.n_time, 2)?;

        let o = &self.observation;
        if !(0.0..1.0).contains(&o.min_fraction) {
            return Err(ConfigError::new("observation.min_fraction", format!("must lie in [0, 1), got {}", o.min_fraction)));
        }
        if !(o.keep > 0.0 && o.keep <= 1.0) {
            return Err(ConfigError::new("observation.keep", format!("must lie in (0, 1], got {}", o.keep)));
        }
        if o.generator == SetGenerator::Fixture && o.fixture.is_none() {
            return Err(ConfigError::new("observation.fixture", "required when generator = \"fixture\""));
        }
        if self.selector.kind == SelectorKind::Direction && self.selector.mu1 == 0.0 && self.selector.mu2 == 0.0 {
            return Err(ConfigError::new("selector.mu1", "direction (0, 0) observes nothing"));
        }
        if self.state.mode >= d.n_modes {
            return Err(ConfigError::new(
                "state.mode",
                format!("mode {} is not below domain.n_modes = {}", self.state.mode, d.n_modes),
            ));
        }
        if self.state.kind == StateKind::Mode && self.state.pair == [0.0, 0.0] {
            return Err(ConfigError::new("state.pair", "must be nonzero"));
        }

        let ip = &self.interp;
        if !(ip.theta > 0.0 && ip.theta < 1.0) {
            return Err(ConfigError::new("interp.theta", format!("must lie in (0, 1), got {}", ip.theta)));
        }
        positive("interp.beta", ip.beta)?;
        positive("interp.s1", ip.s1)?;
        if !(ip.s2 > ip.s1) {
            return Err(ConfigError::new("interp.s2", format!("must exceed interp.s1 = {}, got {}", ip.s1, ip.s2)));
        }
        if ip.s2 > self.time.horizon {
            return Err(ConfigError::new(
                "interp.s2",
                format!("must not exceed time.horizon = {}, got {}", self.time.horizon, ip.s2),
            ));
        }
        at_least("interp.batch", ip.batch, 1)?;
        at_least("interp.depth", ip.depth, 1)?;
        if !(ip.pi1 >= 1.0 && ip.pi1.is_finite()) {
            return Err(ConfigError::new("interp.pi1", format!("must be at least 1, got {}", ip.pi1)));
        }
        positive("interp.lambda", ip.lambda)?;
        at_least("interp.restarts", ip.restarts, 1)?;

        let ce = &self.counterexample;
        if ce.mode >= d.n_modes {
            return Err(ConfigError::new(
                "counterexample.mode",
                format!("mode {} is not below domain.n_modes = {}", ce.mode, d.n_modes),
            ));
        }
        if !(ce.s > 0.0 && ce.s < self.time.horizon) {
            return Err(ConfigError::new("counterexample.s", format!("must lie in (0, time.horizon), got {}", ce.s)));
        }
        at_least("counterexample.multi", ce.multi, 1)?;

        let c = &self.control;
        if !(c.nu1 < c.nu2) {
            return Err(ConfigError::new("control.nu1", format!("must be below control.nu2, got ν₁ = {} ≥ ν₂ = {}", c.nu1, c.nu2)));
        }
        positive("control.radius", c.radius)?;
        if !(c.tol > 1e-6 && c.tol < 1e-1) {
            return Err(ConfigError::new("control.tol", format!("must lie in (1e-6, 1e-1), got {}", c.tol)));
        }
        positive("control.t_max", c.t_max)?;
        at_least("control.n_time", c.n_time, 1)?;
        at_least("control.modes", c.modes, 1)?;
        at_least("control.l_restarts", c.l_restarts, 1)?;
        at_least("control.max_iter", c.max_iter, 1)?;
        at_least("sweep.probes", self.sweep.probes, 1)?;
        Ok(())
    }

    pub fn domain(&self) -> coupled_obs::Result<SpectralDomain> {
        let d = &self.domain;
        match d.kind {
            DomainShape::Interval => SpectralDomain::interval(d.lx, d.n_modes, d.cells),
            DomainShape::Rectangle => SpectralDomain::rectangle(d.lx, d.ly, d.n_modes, d.cells, d.cells_y),
        }
    }

    pub fn control_modes(&self) -> usize {
        self.control.modes.min(self.domain.n_modes)
    }

    pub fn params(&self) -> coupled_obs::Result<PhysicalParams> {
        PhysicalParams::new(self.params.a, self.params.b)
    }
}
