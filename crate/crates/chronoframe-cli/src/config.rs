//! Scenario files: TOML documents deserialized into [`ScenarioConfig`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use chronoframe::clock::{build_clock, ClockModel, Direction, ProfileKind};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Signaling,
    NaiveDemo,
    ReversedOrder,
    SyncScan,
    Switch,
    TwoFrame,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Signaling => "signaling",
            Experiment::NaiveDemo => "naive_demo",
            Experiment::ReversedOrder => "reversed_order",
            Experiment::SyncScan => "sync_scan",
            Experiment::Switch => "switch",
            Experiment::TwoFrame => "two_frame",
        }
    }

    /// The parameter a sweep may vary.
    pub fn sweep_parameter(self) -> SweepParameter {
        match self {
            Experiment::Signaling | Experiment::NaiveDemo => SweepParameter::TF,
            Experiment::ReversedOrder => SweepParameter::Sigma,
            Experiment::SyncScan => SweepParameter::D,
            Experiment::Switch | Experiment::TwoFrame => SweepParameter::TauB,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum DirectionConfig {
    #[default]
    Forward,
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ClockConfig {
    pub label: String,
    #[serde(default = "default_d")]
    pub d: usize,
    /// Grid spacing; defaults to 2π/d.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub direction: DirectionConfig,
}

fn default_d() -> usize {
    64
}

impl ClockConfig {
    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(2.0 * PI / self.d as f64)
    }

    pub fn period(&self) -> f64 {
        self.dt() * self.d as f64
    }

    pub fn build(&self) -> chronoframe::Result<ClockModel> {
        let dir = match self.direction {
            DirectionConfig::Forward => Direction::Forward,
            DirectionConfig::Reverse => Direction::Reverse,
        };
        build_clock(self.label.clone(), self.d, self.dt(), dir)
    }
}

fn default_clocks() -> Vec<ClockConfig> {
    vec![ClockConfig { label: "C".into(), d: default_d(), dt: None, direction: DirectionConfig::Forward }]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub label: String,
    #[serde(default = "default_factor_dim")]
    pub dim: usize,
}

fn default_factor_dim() -> usize {
    2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianPreset {
    /// X ⊗ X on the first two factors.
    Interacting,
    /// X ⊗ 1 + 1 ⊗ X on the first two factors.
    Independent,
    Zero,
}

/// A square matrix stored as JSON `{"re": [[..]], "im": [[..]]}`; `im` may be
/// omitted. Relative paths resolve against the scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub file: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum HamiltonianConfig {
    Preset(HamiltonianPreset),
    Custom(MatrixFile),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// |0…0⟩.
    Zero,
    /// |+⟩ on the first factor, |0⟩ elsewhere.
    Plus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default = "default_factors")]
    pub factors: Vec<FactorConfig>,
    #[serde(default = "default_hamiltonian")]
    pub hamiltonian: HamiltonianConfig,
    /// Defaults to `plus` for `reversed_order` and `zero` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
}

fn default_factors() -> Vec<FactorConfig> {
    vec![FactorConfig { label: "A".into(), dim: 2 }, FactorConfig { label: "B".into(), dim: 2 }]
}

fn default_hamiltonian() -> HamiltonianConfig {
    HamiltonianConfig::Preset(HamiltonianPreset::Zero)
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self { factors: default_factors(), hamiltonian: default_hamiltonian(), initial: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Kronecker {
        #[serde(default)]
        center: f64,
    },
    Gaussian {
        #[serde(default)]
        center: f64,
        sigma: f64,
    },
    Bimodal {
        #[serde(default)]
        center: f64,
        offset: f64,
        sigma: f64,
    },
}

impl ProfileConfig {
    pub fn kind(self) -> ProfileKind {
        match self {
            ProfileConfig::Kronecker { center } => ProfileKind::Kronecker { center },
            ProfileConfig::Gaussian { center, sigma } => ProfileKind::Gaussian { center, sigma },
            ProfileConfig::Bimodal { center, offset, sigma } => ProfileKind::Bimodal { center, offset, sigma },
        }
    }

    pub fn sigma(self) -> f64 {
        match self {
            ProfileConfig::Kronecker { .. } => 0.0,
            ProfileConfig::Gaussian { sigma, .. } | ProfileConfig::Bimodal { sigma, .. } => sigma,
        }
    }

    pub fn with_sigma(self, s: f64) -> Self {
        match self {
            ProfileConfig::Kronecker { center } => ProfileConfig::Gaussian { center, sigma: s },
            ProfileConfig::Gaussian { center, .. } => ProfileConfig::Gaussian { center, sigma: s },
            ProfileConfig::Bimodal { center, offset, .. } => ProfileConfig::Bimodal { center, offset, sigma: s },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorPreset {
    Hadamard,
    /// Von Neumann coupling of a Y measurement on the target to the ancilla `<target>p`.
    YMeasurement,
    PauliX,
    PauliY,
    PauliZ,
    PhaseS,
    Identity,
    /// Random unitary drawn from `--seed`.
    Random,
}

impl GeneratorPreset {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorPreset::Hadamard => "hadamard",
            GeneratorPreset::YMeasurement => "y_measurement",
            GeneratorPreset::PauliX => "pauli_x",
            GeneratorPreset::PauliY => "pauli_y",
            GeneratorPreset::PauliZ => "pauli_z",
            GeneratorPreset::PhaseS => "phase_s",
            GeneratorPreset::Identity => "identity",
            GeneratorPreset::Random => "random",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum GeneratorConfig {
    Preset(GeneratorPreset),
    /// Hermitian K on the target factor; the kick applies e^{-iK}.
    Custom(MatrixFile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct KickConfig {
    pub clock: String,
    #[serde(default)]
    pub tau: f64,
    pub generator: GeneratorConfig,
    pub target: String,
    /// Name used in output columns; defaults to the preset name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl KickConfig {
    pub fn name(&self) -> String {
        match (&self.label, &self.generator) {
            (Some(l), _) => l.clone(),
            (None, GeneratorConfig::Preset(p)) => p.as_str().to_string(),
            (None, GeneratorConfig::Custom(_)) => "custom".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    X,
    #[default]
    Y,
    Z,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::X => "x",
            Basis::Y => "y",
            Basis::Z => "z",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MeasurementConfig {
    pub target: String,
    #[serde(default)]
    pub basis: Basis,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TimesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<f64>,
    /// Evolution interval of `reversed_order`; defaults to a quarter period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_tau: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    TF,
    Sigma,
    D,
    TauB,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::TF => "t_f",
            SweepParameter::Sigma => "sigma",
            SweepParameter::D => "d",
            SweepParameter::TauB => "tau_b",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum SweepUnit {
    #[default]
    One,
    Pi,
    /// Grid spacing of the first clock.
    Dt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    /// Explicit values, in `unit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    /// `start + k·step` for k in 0..count, in `unit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default)]
    pub unit: SweepUnit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub experiment: Experiment,
    #[serde(default = "default_clocks")]
    pub clocks: Vec<ClockConfig>,
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileConfig>,
    #[serde(default)]
    pub kicks: Vec<KickConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement: Option<MeasurementConfig>,
    #[serde(default)]
    pub times: TimesConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    /// Directory of the scenario file, for resolving matrix files.
    #[serde(skip)]
    #[schemars(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Parses a scenario document. Structural errors carry the offending path.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let de = toml::Deserializer::parse(text)
        .map_err(|e| ConfigError::Parse { path: String::new(), message: e.to_string() })?;
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.message().to_string();
        if let Some(field) = message.strip_prefix("unknown field `").and_then(|m| m.split('`').next()) {
            let full = if path == "." || path.is_empty() {
                field.to_string()
            } else if path == field || path.ends_with(&format!(".{field}")) {
                path
            } else {
                format!("{path}.{field}")
            };
            return ConfigError::UnknownField(full);
        }
        ConfigError::Parse { path, message }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    cfg.base_dir = path.parent().map(Path::to_path_buf);
    Ok(cfg)
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

impl ScenarioConfig {
    pub fn clock(&self, label: &str) -> Option<&ClockConfig> {
        self.clocks.iter().find(|c| c.label == label)
    }

    pub fn has_factor(&self, label: &str) -> bool {
        self.system.factors.iter().any(|f| f.label == label)
    }

    pub fn period(&self) -> f64 {
        self.clocks[0].period()
    }

    /// Sets every clock to `d` levels with the period of the first clock.
    pub fn set_clock_dim(&mut self, d: usize) {
        let p = self.period();
        for c in &mut self.clocks {
            c.d = d;
            c.dt = Some(p / d as f64);
        }
    }

    /// Sweep values converted to absolute units; a single point without a sweep.
    pub fn sweep_points(&self) -> Result<Vec<Option<f64>>, ConfigError> {
        let Some(s) = &self.sweep else { return Ok(vec![None]) };
        let scale = match s.unit {
            SweepUnit::One => 1.0,
            SweepUnit::Pi => PI,
            SweepUnit::Dt => self.clocks[0].dt(),
        };
        let raw: Vec<f64> = match (&s.values, s.start, s.step, s.count) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(h), Some(n)) => (0..n).map(|k| a + k as f64 * h).collect(),
            _ => return Err(invalid("sweep", "give either `values` or all of `start`, `step`, `count`")),
        };
        if raw.is_empty() {
            return Err(invalid("sweep", "no sweep points"));
        }
        Ok(raw.into_iter().map(|x| Some(x * scale)).collect())
    }

    /// Copy of the scenario with the swept parameter set to `value`.
    pub fn at_point(&self, value: Option<f64>) -> Result<ScenarioConfig, ConfigError> {
        let mut c = self.clone();
        let Some(v) = value else { return Ok(c) };
        match self.experiment.sweep_parameter() {
            SweepParameter::TF => c.times.t_f = Some(v),
            SweepParameter::Sigma => {
                let p = c.profile.ok_or_else(|| invalid("profile", "sweeping sigma needs a profile"))?;
                c.profile = Some(p.with_sigma(v));
            }
            SweepParameter::D => {
                if v < 2.0 || v.fract() != 0.0 {
                    return Err(invalid("sweep.values", format!("{v} is not a clock dimension")));
                }
                c.set_clock_dim(v as usize);
            }
            SweepParameter::TauB => {
                let k = c.kicks.get_mut(1).ok_or_else(|| invalid("kicks", "sweeping tau_b needs two kicks"))?;
                k.tau = v;
            }
        }
        c.sweep = None;
        Ok(c)
    }

    /// Structural checks that need no numerics beyond grid lookups.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.clocks.is_empty() {
            return Err(invalid("clocks", "at least one clock is required"));
        }
        for (i, c) in self.clocks.iter().enumerate() {
            if self.clocks[..i].iter().any(|o| o.label == c.label) {
                return Err(invalid(format!("clocks[{i}].label"), format!("duplicate label `{}`", c.label)));
            }
            c.build().map_err(|e| invalid(format!("clocks[{i}]"), e.to_string()))?;
        }
        for (i, f) in self.system.factors.iter().enumerate() {
            if self.system.factors[..i].iter().any(|o| o.label == f.label) || self.clock(&f.label).is_some() {
                return Err(invalid(format!("system.factors[{i}].label"), format!("duplicate label `{}`", f.label)));
            }
        }
        if let Some(s) = &self.sweep {
            let want = self.experiment.sweep_parameter();
            if s.parameter != want {
                return Err(invalid(
                    "sweep.parameter",
                    format!("{} sweeps `{}`", self.experiment.as_str(), want.as_str()),
                ));
            }
            self.sweep_points()?;
        }
        for (i, k) in self.kicks.iter().enumerate() {
            let clock = self
                .clock(&k.clock)
                .ok_or_else(|| invalid(format!("kicks[{i}].clock"), format!("unknown clock `{}`", k.clock)))?;
            if !self.has_factor(&k.target) {
                return Err(invalid(format!("kicks[{i}].target"), format!("unknown factor `{}`", k.target)));
            }
            check_grid(clock, &format!("kicks[{i}].tau"), k.tau)?;
            if self.kicks[..i].iter().any(|o| o.name() == k.name()) {
                return Err(invalid(format!("kicks[{i}].label"), format!("duplicate kick name `{}`", k.name())));
            }
        }
        if let Some(m) = &self.measurement {
            if !self.has_factor(&m.target) {
                return Err(invalid("measurement.target", format!("unknown factor `{}`", m.target)));
            }
        }
        let c0 = &self.clocks[0];
        for (field, t) in [("times.t_f", self.times.t_f), ("times.readout", self.times.readout)] {
            if let Some(t) = t {
                check_grid(c0, field, t)?;
            }
        }
        if let Some(p) = self.profile {
            if p.sigma() < 0.0 {
                return Err(invalid("profile.sigma", "must be non-negative"));
            }
            self.check_guard_gaps(p.sigma())?;
        }
        Ok(())
    }

    /// Every timed reading stays 3σ away from the wrap-around of its clock.
    fn check_guard_gaps(&self, sigma: f64) -> Result<(), ConfigError> {
        if !matches!(self.experiment, Experiment::Switch | Experiment::TwoFrame) {
            return Ok(());
        }
        let gap = 3.0 * sigma;
        let p = self.period();
        let mut readings: Vec<(String, f64)> =
            self.kicks.iter().enumerate().map(|(i, k)| (format!("kicks[{i}].tau"), k.tau)).collect();
        if let Some(r) = self.times.readout {
            readings.push(("times.readout".into(), r));
        }
        for (field, t) in readings {
            if t < gap || t > p - gap {
                return Err(ConfigError::GuardGap { field, value: t, gap });
            }
        }
        Ok(())
    }
}

fn check_grid(c: &ClockConfig, field: &str, t: f64) -> Result<(), ConfigError> {
    let model = c.build().map_err(|e| invalid(field, e.to_string()))?;
    model.grid_index(t).map_err(|_| ConfigError::OffGridTime { field: field.to_string(), value: t })?;
    Ok(())
}

/// JSON schema of the scenario format.
pub fn schema() -> serde_json::Value {
    serde_json::to_value(schemars::schema_for!(ScenarioConfig)).expect("schema serializes")
}
