//! Experiment configuration: TOML files, presets and command-line overrides.
//!
//! Settings resolve in increasing priority: built-in defaults, the named
//! preset, the config file, explicit overrides.
//!
//! ```toml
//! [scenario]
//! preset = "paper-k10"
//! horizon = 20000
//! attack = { rho = 0.3, strategy = "targeted-uniform", magnitude = 1800 }
//!
//! [experiment]
//! trials = 20
//! seed = 42
//!
//! [[policies]]
//! algorithm = "med-e-ucb"
//! group_size = 1000
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{self, ArmSpec, AttackSpec, AttackStrategy, EnvError, Scenario};
use crate::policies::{trim_for_rho, PolicyConfig, PolicyError, ALL_TAGS};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("unknown policy {0:?}; known: {known}", known = ALL_TAGS.join(", "))]
    UnknownPolicy(String),
    #[error("no scenario: give a preset or [scenario] arms")]
    NoScenario,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

pub const DEFAULT_TRIALS: u64 = 20;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PRESET: &str = "paper-k10";
pub const DEFAULT_POLICIES: [&str; 2] = ["med-e-ucb", "med-eps-greedy"];
/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "ROBUST_MAB_OUT";
pub const DEFAULT_OUTPUT: &str = "robust-mab-out";

/// A named starting point: scenario plus the block size med-E-UCB uses.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub scenario: Scenario,
    pub group_size: u64,
}

/// Experiment presets: the scenario presets plus a variant of
/// the ten-arm setup with `G = 10⁴`.
pub fn presets() -> Vec<Preset> {
    let mut out = Vec::new();
    for &(name, description) in env::PRESETS {
        let scenario = env::preset(name).expect("listed preset exists");
        let group_size = if name == "radio-sinr" { 200 } else { 1000 };
        out.push(Preset {
            name,
            description,
            scenario,
            group_size,
        });
    }
    out.push(Preset {
        name: "paper-k10-g10000",
        description: "paper-k10 with med-E-UCB block size G = 10000",
        scenario: env::preset("paper-k10").expect("paper-k10 exists"),
        group_size: 10_000,
    });
    out
}

pub fn find_preset(name: &str) -> Result<Preset, ConfigError> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub preset: Option<String>,
    pub arms: Option<Vec<ArmSpec>>,
    pub attack: Option<AttackSpec>,
    pub horizon: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub policies: Vec<PolicyConfig>,
}

impl ConfigFile {
    pub fn parse(path: &str, text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: shown.clone(),
            source,
        })?;
        Self::parse(&shown, &text)
    }
}

/// Command-line values that take precedence over everything else.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<String>,
    pub rho: Option<f64>,
    pub attack: Option<AttackStrategy>,
    pub horizon: Option<u64>,
    pub policies: Option<Vec<String>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub group_size: Option<u64>,
    pub b: Option<f64>,
    pub omega: Option<f64>,
    pub c: Option<f64>,
    pub output: Option<PathBuf>,
}

/// Fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub preset: Option<String>,
    pub scenario: Scenario,
    pub policies: Vec<PolicyConfig>,
    pub trials: u64,
    pub seed: u64,
    pub output: PathBuf,
}

fn check_range(name: &str, v: f64, ok: bool) -> Result<(), ConfigError> {
    if ok && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("{name} = {v} is out of range")))
    }
}

impl Overrides {
    /// Range checks that need no other context.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(r) = self.rho {
            check_range("rho", r, (0.0..1.0).contains(&r))?;
        }
        for (name, v) in [("b", self.b), ("omega", self.omega), ("c", self.c)] {
            if let Some(v) = v {
                check_range(name, v, v > 0.0)?;
            }
        }
        if self.trials == Some(0) {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        if self.horizon == Some(0) {
            return Err(ConfigError::Invalid("horizon must be at least 1".into()));
        }
        if self.group_size == Some(0) {
            return Err(ConfigError::Invalid("group size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Tag to policy, with the trim fraction matched to `rho`.
pub fn policy_for_tag(tag: &str, rho: f64) -> Result<PolicyConfig, ConfigError> {
    let mut p = PolicyConfig::from_tag(tag).ok_or_else(|| ConfigError::UnknownPolicy(tag.to_string()))?;
    match &mut p {
        PolicyConfig::TrimmedUcb { alpha_trim, .. } | PolicyConfig::TrimmedEpsGreedy { alpha_trim, .. } => {
            *alpha_trim = trim_for_rho(rho);
        }
        _ => {}
    }
    Ok(p)
}

/// Merge defaults, preset, file and overrides, then validate.
pub fn resolve(file: Option<&ConfigFile>, over: &Overrides) -> Result<Resolved, ConfigError> {
    over.validate()?;
    let empty = ConfigFile::default();
    let file = file.unwrap_or(&empty);

    let preset_name = over
        .preset
        .clone()
        .or_else(|| file.scenario.preset.clone())
        .or_else(|| file.scenario.arms.is_none().then(|| DEFAULT_PRESET.to_string()));
    let preset = preset_name.as_deref().map(find_preset).transpose()?;

    let mut arms: Option<Vec<ArmSpec>> = preset.as_ref().map(|p| p.scenario.arms().to_vec());
    let mut attack = preset.as_ref().map_or_else(AttackSpec::none, |p| p.scenario.attack().clone());
    let mut horizon = preset.as_ref().map(|p| p.scenario.horizon());
    let mut group_size = preset.as_ref().map(|p| p.group_size);

    if let Some(a) = &file.scenario.arms {
        arms = Some(a.clone());
    }
    if let Some(a) = &file.scenario.attack {
        attack = a.clone();
    }
    if let Some(h) = file.scenario.horizon {
        horizon = Some(h);
    }

    if let Some(s) = &over.attack {
        attack.strategy = s.clone();
    }
    if let Some(r) = over.rho {
        attack.rho = r;
    }
    if let Some(h) = over.horizon {
        horizon = Some(h);
    }
    if over.group_size.is_some() {
        group_size = over.group_size;
    }

    let arms = arms.ok_or(ConfigError::NoScenario)?;
    let horizon = horizon.ok_or_else(|| ConfigError::Invalid("no horizon given".into()))?;
    let scenario = Scenario::new(arms, attack, horizon)?;
    let rho = scenario.attack().rho;

    let mut policies = match &over.policies {
        Some(tags) => tags.iter().map(|t| policy_for_tag(t, rho)).collect::<Result<Vec<_>, _>>()?,
        None if !file.policies.is_empty() => file.policies.clone(),
        None => DEFAULT_POLICIES
            .iter()
            .map(|t| policy_for_tag(t, rho))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let from_file = over.policies.is_none() && !file.policies.is_empty();
    for p in &mut policies {
        match p {
            PolicyConfig::MedEUcb { b, omega, group_size: g } => {
                // Entries written in the file keep their own block size
                // unless the command line sets one.
                if let Some(v) = over.group_size.or(if from_file { None } else { group_size }) {
                    *g = v;
                }
                if let Some(v) = over.b {
                    *b = v;
                }
                if let Some(v) = over.omega {
                    *omega = v;
                }
            }
            PolicyConfig::RucbMab { omega } => {
                if let Some(v) = over.omega {
                    *omega = v;
                }
            }
            PolicyConfig::MedEpsGreedy { c }
            | PolicyConfig::EpsGreedy { c }
            | PolicyConfig::TrimmedEpsGreedy { c, .. } => {
                if let Some(v) = over.c {
                    *c = v;
                }
            }
            _ => {}
        }
        p.validate(scenario.num_arms())?;
    }

    let trials = over.trials.or(file.experiment.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(ConfigError::Invalid("trials must be at least 1".into()));
    }
    let seed = over.seed.or(file.experiment.seed).unwrap_or(DEFAULT_SEED);
    let output = over
        .output
        .clone()
        .or_else(|| file.experiment.output.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));

    Ok(Resolved {
        preset: preset_name,
        scenario,
        policies,
        trials,
        seed,
        output,
    })
}
