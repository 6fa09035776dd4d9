//! TOML experiment files.
//!
//! ```toml
//! [scenario]
//! total_power_mw = 60
//! g_max = "p999"                # or a number; shared by Rayleigh channels
//!
//! [scenario.rate]
//! kind = "shannon-log"          # or "tabulated" with [[scenario.rate.curves]]
//!
//! [[scenario.channels]]
//! power_levels_mw = [10, 20, 30]
//! law = { kind = "truncated-rayleigh", sigma = 2.0, noise_density_dbw_per_hz = -80.0, bandwidth_hz = 4e6 }
//!
//! [[scenario.channels]]
//! power_levels_mw = [10, 20]
//! law = { kind = "discrete", points = [[0.2, 0.25], [0.6, 0.75]] }
//!
//! [run]
//! policy = "cwf2"               # cwf1 | cwf2 | ucb1 | llr | all
//! objective = "o2"
//! horizon = 1000000
//! runs = 20
//! master_seed = 1
//! generator = "chacha20"
//!
//! [output]
//! directory = "out"
//! formats = ["csv"]
//! ```
//!
//! Unknown keys are rejected. [`ConfigFile::to_canonical_string`] writes a
//! form that parses back to an identical value.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{
    p999_g_max, ChannelDistribution, ChannelError, DiscreteLaw, RayleighParams, TruncatedRayleigh, GENERATOR_NAME,
};
use crate::harness::RunConfig;
use crate::model::{Curve, ModelError, PowerMw, RateFunction, Scenario, TabulatedRate};
use crate::oracle::Objective;
use crate::policies::{ArgmaxStrategy, PolicyKind, PolicyOptions};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("scenario.channels[{channel}].law: {source}")]
    Law {
        channel: usize,
        #[source]
        source: ChannelError,
    },
    #[error("scenario: {0}")]
    Model(#[from] ModelError),
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub total_power_mw: PowerMw,
    #[serde(default = "default_true")]
    pub include_zero_allocation: bool,
    #[serde(default)]
    pub g_max: GMaxSpec,
    #[serde(default)]
    pub rate: RateSpec,
    pub channels: Vec<ChannelSpec>,
}

fn default_true() -> bool {
    true
}

/// Gain normalizer: a fixed value or the 99.9th percentile of the strongest
/// Rayleigh channel's gain-to-noise ratio.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GMaxSpec {
    Value(f64),
    #[default]
    P999,
}

impl Serialize for GMaxSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GMaxSpec::Value(v) => s.serialize_f64(*v),
            GMaxSpec::P999 => s.serialize_str("p999"),
        }
    }
}

impl<'de> Deserialize<'de> for GMaxSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;

        impl serde::de::Visitor<'_> for V {
            type Value = GMaxSpec;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive number or \"p999\"")
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<GMaxSpec, E> {
                Ok(GMaxSpec::Value(v))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<GMaxSpec, E> {
                Ok(GMaxSpec::Value(v as f64))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<GMaxSpec, E> {
                Ok(GMaxSpec::Value(v as f64))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<GMaxSpec, E> {
                if v == "p999" {
                    Ok(GMaxSpec::P999)
                } else {
                    Err(E::custom(format!("expected a number or \"p999\", got \"{v}\"")))
                }
            }
        }

        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RateSpec {
    #[default]
    ShannonLog,
    Tabulated { curves: Vec<CurveSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub channel: usize,
    pub power_mw: PowerMw,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub power_levels_mw: Vec<PowerMw>,
    pub law: LawSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawSpec {
    Discrete {
        /// `[value, probability]` pairs.
        points: Vec<[f64; 2]>,
    },
    TruncatedRayleigh {
        sigma: f64,
        noise_density_dbw_per_hz: f64,
        bandwidth_hz: f64,
        /// Overrides the scenario-wide normalizer for this channel.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g_max: Option<GMaxSpec>,
    },
}

/// One policy or all four.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicySelection {
    One(PolicyKind),
    All,
}

impl PolicySelection {
    pub fn kinds(self) -> Vec<PolicyKind> {
        match self {
            PolicySelection::One(k) => vec![k],
            PolicySelection::All => PolicyKind::ALL.to_vec(),
        }
    }
}

impl FromStr for PolicySelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            Ok(PolicySelection::All)
        } else {
            s.parse().map(PolicySelection::One).map_err(|e| e.to_string())
        }
    }
}

impl TryFrom<String> for PolicySelection {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PolicySelection> for String {
    fn from(p: PolicySelection) -> Self {
        p.to_string()
    }
}

impl fmt::Display for PolicySelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySelection::One(k) => write!(f, "{k}"),
            PolicySelection::All => f.write_str("all"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_policy")]
    pub policy: PolicySelection,
    /// Objective whose optimal set defines `T_non`; when absent CWF2 uses O2
    /// and the other policies O1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Objective>,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_generator")]
    pub generator: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_override: Option<usize>,
    #[serde(default)]
    pub argmax: ArgmaxStrategy,
}

fn default_policy() -> PolicySelection {
    PolicySelection::All
}

fn default_horizon() -> u64 {
    100_000
}

fn default_runs() -> usize {
    20
}

fn default_generator() -> String {
    GENERATOR_NAME.to_string()
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            policy: default_policy(),
            objective: None,
            horizon: default_horizon(),
            runs: default_runs(),
            master_seed: 0,
            generator: default_generator(),
            checkpoints: Vec::new(),
            l_override: None,
            argmax: ArgmaxStrategy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<String> {
    vec!["csv".to_string()]
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

impl FromStr for ConfigFile {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let cfg: ConfigFile = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        text.parse()
    }

    /// Checks everything that does not need the scenario built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.run.generator != GENERATOR_NAME {
            return Err(invalid(
                "run.generator",
                format!("unsupported generator \"{}\" (only \"{GENERATOR_NAME}\")", self.run.generator),
            ));
        }
        if self.run.runs == 0 {
            return Err(invalid("run.runs", "must be at least 1"));
        }
        if self.run.l_override == Some(0) {
            return Err(invalid("run.l_override", "must be at least 1"));
        }
        if let Some(f) = self.output.formats.iter().find(|f| f.as_str() != "csv") {
            return Err(invalid("output.formats", format!("unsupported format \"{f}\" (only \"csv\")")));
        }
        if let GMaxSpec::Value(g) = self.scenario.g_max {
            if !(g > 0.0 && g.is_finite()) {
                return Err(invalid("scenario.g_max", format!("must be positive, got {g}")));
            }
        }
        Ok(())
    }

    /// Same content in a fixed layout; parsing it yields `self` again.
    pub fn to_canonical_string(&self) -> String {
        toml::to_string(self).expect("config values are always representable in TOML")
    }

    pub fn build_scenario(&self) -> Result<Scenario, ConfigError> {
        let spec = &self.scenario;
        let rayleigh: Vec<RayleighParams> = spec
            .channels
            .iter()
            .filter_map(|c| match c.law {
                LawSpec::TruncatedRayleigh {
                    sigma,
                    noise_density_dbw_per_hz,
                    bandwidth_hz,
                    ..
                } => Some(RayleighParams {
                    sigma,
                    noise_density_dbw_per_hz,
                    bandwidth_hz,
                }),
                LawSpec::Discrete { .. } => None,
            })
            .collect();
        for (i, c) in spec.channels.iter().enumerate() {
            if let LawSpec::TruncatedRayleigh {
                sigma,
                noise_density_dbw_per_hz,
                bandwidth_hz,
                ..
            } = c.law
            {
                RayleighParams {
                    sigma,
                    noise_density_dbw_per_hz,
                    bandwidth_hz,
                }
                .validate()
                .map_err(|source| ConfigError::Law { channel: i, source })?;
            }
        }
        let p999 = p999_g_max(&rayleigh);
        let resolve = |g: GMaxSpec| match g {
            GMaxSpec::Value(v) => v,
            GMaxSpec::P999 => p999.unwrap_or(f64::NAN),
        };

        let laws = spec
            .channels
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let law = match &c.law {
                    LawSpec::Discrete { points } => {
                        DiscreteLaw::new(points.iter().map(|p| (p[0], p[1])).collect()).map(ChannelDistribution::Discrete)
                    }
                    LawSpec::TruncatedRayleigh {
                        sigma,
                        noise_density_dbw_per_hz,
                        bandwidth_hz,
                        g_max,
                    } => TruncatedRayleigh::new(
                        RayleighParams {
                            sigma: *sigma,
                            noise_density_dbw_per_hz: *noise_density_dbw_per_hz,
                            bandwidth_hz: *bandwidth_hz,
                        },
                        resolve(g_max.unwrap_or(spec.g_max)),
                    )
                    .map(ChannelDistribution::TruncatedRayleigh),
                };
                law.map_err(|source| ConfigError::Law { channel: i, source })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let rate = match &spec.rate {
            RateSpec::ShannonLog => RateFunction::ShannonLog,
            RateSpec::Tabulated { curves } => {
                let mut tables: Vec<BTreeMap<PowerMw, Curve>> = vec![BTreeMap::new(); spec.channels.len()];
                for (k, c) in curves.iter().enumerate() {
                    let key = format!("scenario.rate.curves[{k}]");
                    let table = tables
                        .get_mut(c.channel)
                        .ok_or_else(|| invalid(&key, format!("channel {} does not exist", c.channel)))?;
                    let curve = Curve::new(c.x.clone(), c.y.clone()).map_err(|e| invalid(&key, e.to_string()))?;
                    if table.insert(c.power_mw, curve).is_some() {
                        return Err(invalid(&key, format!("duplicate curve for {} mW", c.power_mw)));
                    }
                }
                RateFunction::Tabulated(TabulatedRate::new(tables))
            }
        };

        Ok(Scenario::new(
            spec.channels.iter().map(|c| c.power_levels_mw.clone()).collect(),
            spec.total_power_mw,
            rate,
            laws,
            spec.include_zero_allocation,
        )?)
    }

    /// Objective used for `T_non` when running `policy`.
    pub fn objective_for(&self, policy: PolicyKind) -> Objective {
        self.run.objective.unwrap_or(match policy {
            PolicyKind::Cwf2 => Objective::O2,
            _ => Objective::O1,
        })
    }

    pub fn run_config(&self, policy: PolicyKind) -> RunConfig {
        RunConfig {
            policy,
            objective: self.objective_for(policy),
            horizon: self.run.horizon,
            master_seed: self.run.master_seed,
            runs: self.run.runs,
            checkpoints: self.run.checkpoints.clone(),
            options: PolicyOptions {
                l_override: self.run.l_override,
                argmax: self.run.argmax,
            },
        }
    }
}
