//! Experiment configuration: defaults, presets, config files and flags.
//!
//! Values resolve in increasing priority: built-in defaults, the preset, the
//! config file, then command-line flags. The resolved [`ExperimentConfig`]
//! serializes to the same flat TOML accepted as a config file, so echoing it
//! and feeding it back reproduces a run exactly.

use std::path::Path;

use gridsched::{FaultSpec, Policy, ScenarioConfig, SimError};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::preset::Preset;

pub const DEFAULT_WINDOW: usize = gridsched::metrics::DEFAULT_CROSSOVER_WINDOW;

/// A fully resolved comparison run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub preset: Option<Preset>,
    pub num_schedulers: usize,
    pub num_resources: usize,
    pub capacity_range: [f64; 2],
    pub job_length_range: [f64; 2],
    pub load_fraction: f64,
    pub steps: u64,
    pub alpha: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub policies: Vec<Policy>,
    pub fail_learner_at: Option<u64>,
    pub window: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let base = ScenarioConfig::default();
        ExperimentConfig {
            preset: None,
            num_schedulers: base.num_schedulers,
            num_resources: base.num_resources,
            capacity_range: [base.capacity_range.0, base.capacity_range.1],
            job_length_range: [base.job_length_range.0, base.job_length_range.1],
            load_fraction: base.load_fraction,
            steps: base.steps,
            alpha: base.alpha,
            epsilon: base.epsilon,
            seed: base.seed,
            policies: Policy::ALL.to_vec(),
            fail_learner_at: None,
            window: DEFAULT_WINDOW,
        }
    }
}

/// Keys a config file may set. Every key is optional; unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<Preset>,
    pub num_schedulers: Option<usize>,
    pub num_resources: Option<usize>,
    pub capacity_range: Option<[f64; 2]>,
    pub job_length_range: Option<[f64; 2]>,
    pub load_fraction: Option<f64>,
    pub steps: Option<u64>,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub policies: Option<Vec<Policy>>,
    pub fail_learner_at: Option<u64>,
    pub window: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::ConfigFile(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

/// Values given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub policies: Option<Vec<Policy>>,
    pub steps: Option<u64>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub load_fraction: Option<f64>,
    pub num_schedulers: Option<usize>,
    pub num_resources: Option<usize>,
    pub fail_learner_at: Option<u64>,
    pub window: Option<usize>,
}

/// Layers defaults, preset, file and flags, then validates the result.
pub fn resolve(file: Option<&ConfigFile>, flags: &Overrides) -> Result<ExperimentConfig, CliError> {
    let empty = ConfigFile::default();
    let file = file.unwrap_or(&empty);
    let mut cfg = ExperimentConfig::default();

    if let Some(preset) = flags.preset.or(file.preset) {
        let v = preset.values();
        cfg.preset = Some(preset);
        cfg.num_schedulers = v.num_schedulers;
        cfg.num_resources = v.num_resources;
        cfg.load_fraction = v.load_fraction;
        cfg.steps = v.steps;
    }

    macro_rules! layer {
        ($src:expr, $($field:ident),*) => {
            $( if let Some(v) = $src.$field.clone() { cfg.$field = v; } )*
        };
    }
    layer!(file, num_schedulers, num_resources, capacity_range, job_length_range, load_fraction, steps, alpha, epsilon, seed, policies, window);
    if file.fail_learner_at.is_some() {
        cfg.fail_learner_at = file.fail_learner_at;
    }
    layer!(flags, num_schedulers, num_resources, load_fraction, steps, alpha, seed, policies, window);
    if flags.fail_learner_at.is_some() {
        cfg.fail_learner_at = flags.fail_learner_at;
    }

    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.policies.is_empty() {
            return Err(CliError::invalid("policies", "at least one of CLDS, LLS, RS, DMMS"));
        }
        let mut seen = self.policies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.policies.len() {
            return Err(CliError::invalid("policies", "each policy at most once"));
        }
        if self.window == 0 {
            return Err(CliError::invalid("window", "an integer >= 1"));
        }
        self.scenario(self.policies[0]).validate().map_err(|e| match e {
            SimError::Config { field, .. } => CliError::invalid(field, valid_range(field)),
            other => CliError::Sim(other),
        })
    }

    /// The single-policy scenario this experiment runs for `policy`.
    pub fn scenario(&self, policy: Policy) -> ScenarioConfig {
        ScenarioConfig {
            num_schedulers: self.num_schedulers,
            num_resources: self.num_resources,
            capacity_range: (self.capacity_range[0], self.capacity_range[1]),
            job_length_range: (self.job_length_range[0], self.job_length_range[1]),
            load_fraction: self.load_fraction,
            steps: self.steps,
            alpha: self.alpha,
            epsilon: self.epsilon,
            policy,
            seed: self.seed,
            fault: self.fail_learner_at.map(|fail_learner_at| FaultSpec { fail_learner_at }),
        }
    }

    /// Flat TOML, loadable again with [`ConfigFile::parse`].
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

fn valid_range(field: &str) -> &'static str {
    match field {
        "num_schedulers" | "num_resources" => "an integer >= 1",
        "capacity_range" | "job_length_range" => "[min, max] with 0 < min <= max, both finite",
        "load_fraction" | "alpha" => "a real in (0, 1]",
        "epsilon" => "a real in [0, 1]",
        _ => "see documentation",
    }
}
