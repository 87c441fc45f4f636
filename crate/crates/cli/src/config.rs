//! Run configuration: defaults, overridden by a JSON file, overridden by flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use endfire::de::{DeConfig, Schedule};
use endfire::excitation::ArrayMode;
use endfire::exec::Execution;
use endfire::workflows::{default_de_config, Cut, FeedPolicy, PatternSpec, SensitivitySpec, GAP_BOUNDS_LAMBDA};
use endfire::workflows::reproduce::ReproduceOptions;
use endfire::{ModelParams, ModelSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Feed port selection; indices are 1-based at this boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "FeedRaw", into = "FeedRaw")]
pub enum FeedSetting {
    #[default]
    Sweep,
    Port(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FeedRaw {
    Port(usize),
    Name(String),
}

impl TryFrom<FeedRaw> for FeedSetting {
    type Error = String;

    fn try_from(raw: FeedRaw) -> Result<Self, String> {
        match raw {
            FeedRaw::Port(k) => FeedSetting::from_str(&k.to_string()),
            FeedRaw::Name(s) => FeedSetting::from_str(&s),
        }
    }
}

impl From<FeedSetting> for FeedRaw {
    fn from(f: FeedSetting) -> Self {
        match f {
            FeedSetting::Sweep => FeedRaw::Name("sweep".into()),
            FeedSetting::Port(k) => FeedRaw::Port(k),
        }
    }
}

impl FromStr for FeedSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("sweep") {
            return Ok(FeedSetting::Sweep);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected `sweep` or a 1-based port index, got `{s}`")),
            Ok(k) => Ok(FeedSetting::Port(k)),
        }
    }
}

impl fmt::Display for FeedSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeedSetting::Sweep => f.write_str("sweep"),
            FeedSetting::Port(k) => write!(f, "{k}"),
        }
    }
}

impl FeedSetting {
    pub fn policy(self, n: usize) -> Result<FeedPolicy> {
        match self {
            FeedSetting::Sweep => Ok(FeedPolicy::Sweep),
            FeedSetting::Port(k) if (1..=n).contains(&k) => Ok(FeedPolicy::Port(k - 1)),
            FeedSetting::Port(k) => Err(CliError::config("feed", format!("port {k} outside 1..={n}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("expected `json` or `csv`, got `{s}`")),
        }
    }
}

/// Differential-evolution settings. Population and generation count default
/// to values that grow with the array size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub crossover: f64,
    pub mutation: f64,
    pub gap_min_lambda: f64,
    pub gap_max_lambda: f64,
    pub schedule: Schedule,
    pub execution: Execution,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            population: None,
            generations: None,
            crossover: 0.8,
            mutation: 0.7,
            gap_min_lambda: GAP_BOUNDS_LAMBDA.0,
            gap_max_lambda: GAP_BOUNDS_LAMBDA.1,
            schedule: Schedule::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UlaSettings {
    pub spacing_lambda: f64,
}

impl Default for UlaSettings {
    fn default() -> Self {
        UlaSettings { spacing_lambda: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    #[default]
    Active,
    Parasitic,
}

impl FromStr for LayoutKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "active" => Ok(LayoutKind::Active),
            "parasitic" => Ok(LayoutKind::Parasitic),
            _ => Err(format!("expected `active` or `parasitic`, got `{s}`")),
        }
    }
}

/// Explicit design for `evaluate`. Loads are in ohms with `null` at the
/// feed; without loads the feed setting selects the port and the loads are
/// derived from the driven array.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSettings {
    pub kind: LayoutKind,
    pub positions_lambda: Vec<f64>,
    pub loads_ohm: Option<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    pub dir: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub seed: u64,
    pub feed: FeedSetting,
    pub model: ModelSpec,
    pub optimizer: OptimizerSettings,
    pub ula: UlaSettings,
    pub layout: Option<LayoutSettings>,
    /// Design JSON consumed by `evaluate`, `sensitivity` and `pattern`.
    pub input: Option<PathBuf>,
    pub sensitivity: SensitivitySpec,
    pub pattern: PatternSpec,
    pub reproduce: ReproduceOptions,
    pub output: OutputSettings,
}

/// Command-line overrides; `None` leaves the file or default value alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub freq_hz: Option<f64>,
    pub seed: Option<u64>,
    pub np: Option<usize>,
    pub iters: Option<usize>,
    pub cr: Option<f64>,
    pub f_factor: Option<f64>,
    pub gap_min_lambda: Option<f64>,
    pub gap_max_lambda: Option<f64>,
    pub feed: Option<FeedSetting>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub execution: Option<Execution>,
    pub spacing_lambda: Option<f64>,
    pub input: Option<PathBuf>,
    pub kind: Option<LayoutKind>,
    pub positions_lambda: Option<Vec<f64>>,
    pub loads_ohm: Option<Vec<Option<f64>>>,
    pub scale: Option<f64>,
    pub samples: Option<usize>,
    pub cut: Option<Cut>,
    pub resolution_deg: Option<f64>,
    pub seeds: Option<Vec<u64>>,
    pub max_n: Option<usize>,
    pub no_optimize: bool,
}

impl RunConfig {
    /// Parses a JSON document; errors name the offending key path.
    pub fn from_json(text: &str) -> Result<Self> {
        let text = if text.trim().is_empty() { "{}" } else { text };
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            let key = if key == "." || key == "?" { "<root>".to_string() } else { key };
            CliError::config(key, e.into_inner().to_string())
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config { key, reason } => CliError::config(key, format!("{reason} (in {})", path.display())),
            other => other,
        })
    }

    /// Defaults, then the file, then the flags.
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut cfg = match file {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        cfg.apply(flags);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        if o.n.is_some() {
            self.n = o.n;
        }
        set(&mut self.model.frequency_hz, &o.freq_hz);
        set(&mut self.seed, &o.seed);
        if o.np.is_some() {
            self.optimizer.population = o.np;
        }
        if o.iters.is_some() {
            self.optimizer.generations = o.iters;
        }
        set(&mut self.optimizer.crossover, &o.cr);
        set(&mut self.optimizer.mutation, &o.f_factor);
        set(&mut self.optimizer.gap_min_lambda, &o.gap_min_lambda);
        set(&mut self.optimizer.gap_max_lambda, &o.gap_max_lambda);
        set(&mut self.optimizer.execution, &o.execution);
        set(&mut self.feed, &o.feed);
        if o.out.is_some() {
            self.output.dir = o.out.clone();
        }
        set(&mut self.output.format, &o.format);
        set(&mut self.ula.spacing_lambda, &o.spacing_lambda);
        if o.input.is_some() {
            self.input = o.input.clone();
        }
        if o.kind.is_some() || o.positions_lambda.is_some() || o.loads_ohm.is_some() {
            let layout = self.layout.get_or_insert_with(LayoutSettings::default);
            set(&mut layout.kind, &o.kind);
            set(&mut layout.positions_lambda, &o.positions_lambda);
            if o.loads_ohm.is_some() {
                layout.loads_ohm = o.loads_ohm.clone();
            }
        }
        set(&mut self.sensitivity.scale, &o.scale);
        set(&mut self.sensitivity.samples, &o.samples);
        set(&mut self.pattern.cut, &o.cut);
        set(&mut self.pattern.resolution_deg, &o.resolution_deg);
        set(&mut self.reproduce.seeds, &o.seeds);
        set(&mut self.reproduce.max_n, &o.max_n);
        if o.no_optimize {
            self.reproduce.optimize = false;
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        self.model.build().map_err(|e| match e {
            endfire::Error::InvalidParameter { name, reason } => CliError::config(format!("model.{name}"), reason),
            other => other.into(),
        })
    }

    /// Array size for commands that build a new array.
    pub fn size(&self) -> Result<usize> {
        match self.n {
            None => Err(CliError::config("n", "required (use --n or the `n` key)")),
            Some(n) if n < 2 => Err(CliError::config("n", format!("need at least 2 elements, got {n}"))),
            Some(n) => Ok(n),
        }
    }

    pub fn de_config(&self, n: usize, mode: ArrayMode) -> Result<DeConfig> {
        let o = &self.optimizer;
        if !(o.gap_min_lambda.is_finite() && o.gap_min_lambda > 0.0) {
            return Err(CliError::config(
                "optimizer.gap_min_lambda",
                format!("must be positive, got {}", o.gap_min_lambda),
            ));
        }
        if !(o.gap_max_lambda.is_finite() && o.gap_max_lambda > o.gap_min_lambda) {
            return Err(CliError::config(
                "optimizer.gap_max_lambda",
                format!("must exceed gap_min_lambda = {}, got {}", o.gap_min_lambda, o.gap_max_lambda),
            ));
        }
        let mut cfg = default_de_config(n, mode, self.seed);
        if let Some(np) = o.population {
            cfg.population = np;
        }
        if let Some(it) = o.generations {
            cfg.generations = it;
        }
        cfg.crossover = o.crossover;
        cfg.mutation = o.mutation;
        cfg.bounds = vec![(o.gap_min_lambda, o.gap_max_lambda); n - 1];
        cfg.schedule = o.schedule;
        cfg.execution = o.execution;
        cfg.validate().map_err(|e| match e {
            endfire::Error::InvalidParameter { name, reason } => CliError::config(format!("optimizer.{name}"), reason),
            other => other.into(),
        })?;
        Ok(cfg)
    }

    /// SHA-256 of the command and the resolved configuration, output
    /// settings excluded.
    pub fn hash(&self, command: &str) -> String {
        #[derive(Serialize)]
        struct Hashed<'a> {
            command: &'a str,
            config: &'a RunConfig,
        }
        let mut cfg = self.clone();
        cfg.output = OutputSettings::default();
        let bytes = serde_json::to_vec(&Hashed { command, config: &cfg }).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
