//! Experiment configuration: presets, TOML config files and command-line
//! flags, merged in that order. `SIM_SEED` overrides everything for the seed.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{AttackRates, CorruptionMode, DurationRange};
use crate::topology::{build_figure1, generate_topology, Level, LevelCounts, Topology, TopologyError};

pub const SEED_ENV: &str = "SIM_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Args(#[from] clap::Error),
    #[error("unknown preset {0:?} (known: paper-like, figure1)")]
    UnknownPreset(String),
    #[error("{field} = {value} is out of range: {expected}")]
    OutOfRange {
        field: &'static str,
        value: String,
        expected: &'static str,
    },
    #[error("bad topology spec {0:?}: expected figure1, figure1-redundant or generated:N,U,L,O,REDUNDANCY")]
    BadTopology(String),
    #[error("cannot read config file {path}: {source}")]
    ReadFile {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config file {path}: {msg}")]
    MalformedFile { path: String, msg: String },
    #[error("{SEED_ENV}={0:?} is not a 64-bit unsigned integer")]
    BadSeedEnv(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

fn out_of_range(field: &'static str, value: impl fmt::Display, expected: &'static str) -> ConfigError {
    ConfigError::OutOfRange {
        field,
        value: value.to_string(),
        expected,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TopologySpec {
    Figure1,
    Figure1Redundant,
    Generated {
        counts: LevelCounts,
        redundancy_factor: f64,
    },
}

impl TopologySpec {
    pub fn build(&self, seed: u64) -> Result<Topology, TopologyError> {
        match *self {
            TopologySpec::Figure1 => Ok(build_figure1(false)),
            TopologySpec::Figure1Redundant => Ok(build_figure1(true)),
            TopologySpec::Generated {
                counts,
                redundancy_factor,
            } => generate_topology(counts, redundancy_factor, seed),
        }
    }

    fn outer_count(&self) -> u32 {
        match self {
            TopologySpec::Figure1 | TopologySpec::Figure1Redundant => 2,
            TopologySpec::Generated { counts, .. } => counts.get(Level::O),
        }
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Figure1 => f.write_str("figure1"),
            TopologySpec::Figure1Redundant => f.write_str("figure1-redundant"),
            TopologySpec::Generated {
                counts,
                redundancy_factor,
            } => write!(
                f,
                "generated:{},{},{},{},{}",
                counts.n, counts.u, counts.l, counts.o, redundancy_factor
            ),
        }
    }
}

impl FromStr for TopologySpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::BadTopology(s.to_string());
        match s {
            "figure1" => return Ok(TopologySpec::Figure1),
            "figure1-redundant" => return Ok(TopologySpec::Figure1Redundant),
            _ => {}
        }
        let args = s.strip_prefix("generated:").ok_or_else(bad)?;
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let [n, u, l, o, r] = parts[..] else {
            return Err(bad());
        };
        let count = |v: &str| v.parse::<u32>().map_err(|_| bad());
        Ok(TopologySpec::Generated {
            counts: LevelCounts::new(count(n)?, count(u)?, count(l)?, count(o)?),
            redundancy_factor: r.parse().map_err(|_| bad())?,
        })
    }
}

impl TryFrom<String> for TopologySpec {
    type Error = ConfigError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<TopologySpec> for String {
    fn from(t: TopologySpec) -> String {
        t.to_string()
    }
}

/// Full parameterization of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub topology: TopologySpec,
    pub ticks: u32,
    pub messages_per_trial: u32,
    pub critical_fraction: f64,
    /// Non-critical messages per trial that also get a parallel copy.
    pub duplication_budget: u32,
    pub rates: AttackRates,
    pub durations: DurationRange,
    pub weighted_attacks: bool,
    pub corruption_mode: CorruptionMode,
    /// Ticks before routing learns that a link is cut. Copies routed onto a
    /// cut link before then are dropped.
    pub route_convergence_ticks: u32,
    pub max_retries: u32,
    pub trials: u32,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::paper_like()
    }
}

impl SimConfig {
    pub const PRESETS: [&'static str; 2] = ["paper-like", "figure1"];

    /// Scaled-up four-level network under mixed attacks. The duplication
    /// budget is the calibrated operating point at which about 90% of the
    /// messages whose primary copy is rewritten in flight also had a
    /// parallel copy.
    pub fn paper_like() -> Self {
        Self {
            topology: TopologySpec::Generated {
                counts: LevelCounts::new(4, 8, 16, 32),
                redundancy_factor: 0.3,
            },
            ticks: 100,
            messages_per_trial: 2000,
            critical_fraction: 0.2,
            duplication_budget: 1353,
            rates: AttackRates {
                tap: 0.01,
                corrupt: 0.00025,
                sever: 0.003,
            },
            durations: DurationRange::default(),
            weighted_attacks: false,
            corruption_mode: CorruptionMode::Consistent,
            route_convergence_ticks: 1,
            max_retries: 4,
            trials: 100,
            seed: 1,
        }
    }

    /// The reference eleven-node network with all traffic between O1 and O4.
    pub fn figure1() -> Self {
        Self {
            topology: TopologySpec::Figure1Redundant,
            messages_per_trial: 50,
            duplication_budget: 10,
            rates: AttackRates {
                tap: 0.05,
                corrupt: 0.02,
                sever: 0.02,
            },
            ..Self::paper_like()
        }
    }

    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        match name {
            "paper-like" => Ok(Self::paper_like()),
            "figure1" => Ok(Self::figure1()),
            other => Err(ConfigError::UnknownPreset(other.to_string())),
        }
    }

    /// A copy with every attack rate zeroed.
    pub fn without_attacks(&self) -> Self {
        Self {
            rates: AttackRates::default(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.ticks == 0 {
            return Err(out_of_range("ticks", self.ticks, ">= 1"));
        }
        if self.messages_per_trial == 0 {
            return Err(out_of_range("messages_per_trial", self.messages_per_trial, ">= 1"));
        }
        if self.trials == 0 {
            return Err(out_of_range("trials", self.trials, ">= 1"));
        }
        if !(0.0..=1.0).contains(&self.critical_fraction) {
            return Err(out_of_range("critical_fraction", self.critical_fraction, "[0, 1]"));
        }
        for (field, rate) in [
            ("rate_tap", self.rates.tap),
            ("rate_corrupt", self.rates.corrupt),
            ("rate_sever", self.rates.sever),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(out_of_range(field, rate, "[0, 1]"));
            }
        }
        if self.durations.min == 0 {
            return Err(out_of_range("duration_min", self.durations.min, ">= 1"));
        }
        if self.durations.max < self.durations.min {
            return Err(out_of_range("duration_max", self.durations.max, ">= duration_min"));
        }
        if let TopologySpec::Generated {
            counts,
            redundancy_factor,
        } = self.topology
        {
            for level in Level::ALL {
                if counts.get(level) == 0 {
                    return Err(out_of_range("topology", self.topology, "level counts >= 1"));
                }
            }
            if !(0.0..=1.0).contains(&redundancy_factor) {
                return Err(out_of_range("topology", self.topology, "redundancy factor in [0, 1]"));
            }
        }
        if self.topology.outer_count() < 2 {
            return Err(out_of_range("topology", self.topology, "at least 2 outer nodes"));
        }
        Ok(())
    }

    /// Effective configuration as TOML, echoed for reproducibility.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Partial configuration read from a TOML file; absent keys keep the
/// preset's values.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    preset: Option<String>,
    topology: Option<TopologySpec>,
    ticks: Option<u32>,
    messages_per_trial: Option<u32>,
    critical_fraction: Option<f64>,
    duplication_budget: Option<u32>,
    rates: Option<AttackRates>,
    durations: Option<DurationRange>,
    weighted_attacks: Option<bool>,
    corruption_mode: Option<CorruptionMode>,
    route_convergence_ticks: Option<u32>,
    max_retries: Option<u32>,
    trials: Option<u32>,
    seed: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(
    name = "nodalsim",
    about = "Paired baseline/protocol trials of dual-path transmission under random link attacks"
)]
pub struct Cli {
    /// Named starting configuration (paper-like, figure1).
    #[arg(long)]
    pub preset: Option<String>,
    /// TOML file with configuration overrides.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// figure1, figure1-redundant or generated:N,U,L,O,REDUNDANCY
    #[arg(long)]
    pub topology: Option<String>,
    #[arg(long)]
    pub ticks: Option<u32>,
    /// Messages per trial.
    #[arg(long)]
    pub messages: Option<u32>,
    #[arg(long)]
    pub critical_fraction: Option<f64>,
    /// Non-critical messages per trial sent with a parallel copy.
    #[arg(long)]
    pub budget: Option<u32>,
    #[arg(long)]
    pub rate_tap: Option<f64>,
    #[arg(long)]
    pub rate_corrupt: Option<f64>,
    #[arg(long)]
    pub rate_sever: Option<f64>,
    #[arg(long)]
    pub duration_min: Option<u32>,
    #[arg(long)]
    pub duration_max: Option<u32>,
    /// Place attacks in proportion to link criticality.
    #[arg(long)]
    pub weighted_attacks: bool,
    /// Corrupting attacker leaves the carried digest untouched.
    #[arg(long)]
    pub payload_only_corruption: bool,
    #[arg(long)]
    pub convergence_ticks: Option<u32>,
    #[arg(long)]
    pub max_retries: Option<u32>,
    #[arg(long)]
    pub trials: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for baseline.csv, protocol.csv and report.txt.
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

impl Cli {
    /// Merges preset, config file, flags and the seed override, then validates.
    pub fn resolve(&self, seed_env: Option<&str>) -> Result<SimConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::ReadFile {
                    path: path.display().to_string(),
                    source,
                })?;
                toml::from_str::<ConfigFile>(&text).map_err(|e| ConfigError::MalformedFile {
                    path: path.display().to_string(),
                    msg: e.to_string(),
                })?
            }
            None => ConfigFile::default(),
        };

        let preset = self
            .preset
            .as_deref()
            .or(file.preset.as_deref())
            .unwrap_or("paper-like");
        let mut cfg = SimConfig::preset(preset)?;

        macro_rules! overlay {
            ($src:expr, $($field:ident),*) => {
                $(if let Some(v) = $src.$field { cfg.$field = v; })*
            };
        }
        overlay!(
            file,
            topology,
            ticks,
            messages_per_trial,
            critical_fraction,
            duplication_budget,
            rates,
            durations,
            weighted_attacks,
            corruption_mode,
            route_convergence_ticks,
            max_retries,
            trials,
            seed
        );

        if let Some(t) = &self.topology {
            cfg.topology = t.parse()?;
        }
        if let Some(v) = self.ticks {
            cfg.ticks = v;
        }
        if let Some(v) = self.messages {
            cfg.messages_per_trial = v;
        }
        if let Some(v) = self.critical_fraction {
            cfg.critical_fraction = v;
        }
        if let Some(v) = self.budget {
            cfg.duplication_budget = v;
        }
        if let Some(v) = self.rate_tap {
            cfg.rates.tap = v;
        }
        if let Some(v) = self.rate_corrupt {
            cfg.rates.corrupt = v;
        }
        if let Some(v) = self.rate_sever {
            cfg.rates.sever = v;
        }
        if let Some(v) = self.duration_min {
            cfg.durations.min = v;
        }
        if let Some(v) = self.duration_max {
            cfg.durations.max = v;
        }
        if self.weighted_attacks {
            cfg.weighted_attacks = true;
        }
        if self.payload_only_corruption {
            cfg.corruption_mode = CorruptionMode::PayloadOnly;
        }
        if let Some(v) = self.convergence_ticks {
            cfg.route_convergence_ticks = v;
        }
        if let Some(v) = self.max_retries {
            cfg.max_retries = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(raw) = seed_env {
            cfg.seed = raw
                .trim()
                .parse()
                .map_err(|_| ConfigError::BadSeedEnv(raw.to_string()))?;
        }

        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses command-line arguments (including the program name) into a
/// validated configuration and the output directory.
pub fn parse_config<I, T>(args: I, seed_env: Option<&str>) -> Result<(SimConfig, PathBuf), ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let cfg = cli.resolve(seed_env)?;
    Ok((cfg, cli.out_dir))
}
