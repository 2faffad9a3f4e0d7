use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use flycat::feasibility::CqedParams;
use flycat::field::LossProfile;
use flycat::paritycheck::Basis;
use serde::{Deserialize, Serialize};

use crate::error::{validation, CliError};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Tradeoff,
    OptimizeAlpha,
    Check,
    Ghz,
    TetraPrepare,
    TetraDecode,
    Witness,
    Teleport,
    Feasibility,
    LossBudget,
    Selfcheck,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Tradeoff,
        Command::OptimizeAlpha,
        Command::Check,
        Command::Ghz,
        Command::TetraPrepare,
        Command::TetraDecode,
        Command::Witness,
        Command::Teleport,
        Command::Feasibility,
        Command::LossBudget,
        Command::Selfcheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Tradeoff => "tradeoff",
            Command::OptimizeAlpha => "optimize-alpha",
            Command::Check => "check",
            Command::Ghz => "ghz",
            Command::TetraPrepare => "tetra-prepare",
            Command::TetraDecode => "tetra-decode",
            Command::Witness => "witness",
            Command::Teleport => "teleport",
            Command::Feasibility => "feasibility",
            Command::LossBudget => "loss-budget",
            Command::Selfcheck => "selfcheck",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    #[default]
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisArg {
    Z,
    X,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Z => Basis::Z,
            BasisArg::X => Basis::X,
        }
    }
}

/// Input state for `check`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputArg {
    /// Random superposition inside the even sector of the check basis,
    /// drawn from the scenario seed.
    #[default]
    Even,
    /// `|+>` on every qubit.
    Plus,
    Zero,
    /// Haar-random, drawn from the scenario seed.
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CableArg {
    Nbti,
    Al,
    Custom,
}

/// A single loss per segment, or one value per segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Eta {
    Uniform(f64),
    Segments(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaRange {
    pub start: f64,
    pub stop: f64,
    /// Number of grid points, endpoints included.
    pub steps: usize,
}

impl AlphaRange {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        if !(self.start > 0.0 && self.stop > self.start && self.stop.is_finite()) {
            return Err(validation(format!(
                "alpha_range: need 0 < start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(validation("alpha_range.steps must be at least 2"));
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        Ok((0..self.steps).map(|k| self.start + h * k as f64).collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Eta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<RunMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta12: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta23: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_range: Option<AlphaRange>,
    /// Uniform losses to sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub syndrome: Option<[i8; 6]>,
    /// Six-character Pauli label, e.g. `"XIIZII"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cable: Option<CableArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub db_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circulators: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_circulator: Option<f64>,
}

impl Params {
    pub fn alpha_or(&self, default: f64) -> f64 {
        self.alpha.unwrap_or(default)
    }

    pub fn mode(&self) -> RunMode {
        self.mode.unwrap_or_default()
    }

    pub fn weight_or(&self, default: usize) -> usize {
        self.weight.unwrap_or(default)
    }

    /// Loss profile of one check. A list fixes the weight; a scalar is spread
    /// over `weight` segments.
    pub fn losses(&self, default_weight: usize, default_eta: f64) -> Result<LossProfile<f64>, CliError> {
        match &self.eta {
            Some(Eta::Segments(v)) => {
                if let Some(w) = self.weight {
                    if w != v.len() {
                        return Err(validation(format!("eta lists {} segments but weight is {w}", v.len())));
                    }
                }
                Ok(LossProfile::new(v.clone())?)
            }
            Some(Eta::Uniform(e)) => Ok(LossProfile::uniform(*e, self.weight_or(default_weight))?),
            None => Ok(LossProfile::uniform(default_eta, self.weight_or(default_weight))?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyUnit {
    /// Linear frequencies, multiplied by `2 pi`.
    Hz,
    #[serde(rename = "kHz")]
    KHz,
    #[serde(rename = "MHz")]
    MHz,
    #[serde(rename = "GHz")]
    GHz,
    /// Already angular.
    #[serde(rename = "rad/s")]
    RadPerSecond,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeUnit {
    #[serde(rename = "s")]
    S,
    #[serde(rename = "ms")]
    Ms,
    #[serde(rename = "us")]
    Us,
    #[serde(rename = "ns")]
    Ns,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frequency {
    pub value: f64,
    pub unit: FrequencyUnit,
}

impl Frequency {
    /// Angular frequency in rad/s.
    pub fn angular(&self) -> f64 {
        let linear = |scale: f64| 2.0 * PI * scale * self.value;
        match self.unit {
            FrequencyUnit::Hz => linear(1.0),
            FrequencyUnit::KHz => linear(1e3),
            FrequencyUnit::MHz => linear(1e6),
            FrequencyUnit::GHz => linear(1e9),
            FrequencyUnit::RadPerSecond => self.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Duration {
    pub value: f64,
    pub unit: TimeUnit,
}

impl Duration {
    pub fn seconds(&self) -> f64 {
        self.value
            * match self.unit {
                TimeUnit::S => 1.0,
                TimeUnit::Ms => 1e-3,
                TimeUnit::Us => 1e-6,
                TimeUnit::Ns => 1e-9,
            }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    #[default]
    Reference,
    Fast,
}

/// Circuit-QED parameters. Unset fields come from the preset; `kappa0`
/// follows `2|chi|` unless given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CqedConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<Frequency>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<Frequency>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa0: Option<Frequency>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_int: Option<Frequency>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<Duration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<Duration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2_star: Option<Duration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl CqedConfig {
    pub fn resolve(&self) -> Result<CqedParams, CliError> {
        let mut p = match self.preset.unwrap_or_default() {
            Preset::Reference => CqedParams::reference(),
            Preset::Fast => CqedParams::fast(),
        };
        if let Some(f) = self.omega_c {
            p.omega_c = f.angular();
        }
        if let Some(f) = self.chi {
            p.chi = f.angular();
            p.kappa0 = 2.0 * p.chi.abs();
        }
        if let Some(f) = self.kappa0 {
            p.kappa0 = f.angular();
        }
        if let Some(f) = self.kappa_int {
            p.kappa_int = f.angular();
        }
        if let Some(t) = self.tau {
            p.tau = t.seconds();
        }
        if let Some(t) = self.t1 {
            p.t1 = t.seconds();
        }
        if let Some(t) = self.t2_star {
            p.t2_star = t.seconds();
        }
        if let Some(a) = self.alpha {
            p.alpha = a;
        }
        p.validate()?;
        Ok(p)
    }
}

/// On-disk layout; `command` may come from the command line instead.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    seed: Option<u64>,
    shots: Option<usize>,
    format: Option<Format>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    cqed: CqedConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub command: Command,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    pub format: Format,
    /// Destination only; not echoed into reports.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
    pub params: Params,
    pub cqed: CqedConfig,
}

impl ScenarioConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            seed: DEFAULT_SEED,
            shots: None,
            format: Format::default(),
            out: None,
            threads: None,
            params: Params::default(),
            cqed: CqedConfig::default(),
        }
    }

    /// Parses TOML. `command`, when given, must agree with the file.
    pub fn from_toml(text: &str, command: Option<Command>) -> Result<Self, CliError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let command = match (file.command, command) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Config(format!("config is for `{a}` but `{b}` was requested")));
            }
            (Some(c), _) | (None, Some(c)) => c,
            (None, None) => return Err(CliError::Config("missing field `command`".into())),
        };
        if file.threads == Some(0) {
            return Err(validation("threads must be positive"));
        }
        Ok(Self {
            command,
            seed: file.seed.unwrap_or(DEFAULT_SEED),
            shots: file.shots,
            format: file.format.unwrap_or_default(),
            out: file.out,
            threads: file.threads,
            params: file.params,
            cqed: file.cqed,
        })
    }

    pub fn load(path: &Path, command: Option<Command>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, command).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn shots_or(&self, default: usize) -> usize {
        self.shots.unwrap_or(default)
    }
}
