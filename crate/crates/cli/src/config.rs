use std::fs;
use std::path::{Path, PathBuf};

use neurolander::evolution::{MutationConfig, ParentSelection};
use neurolander::{EvolutionConfig, ObjectiveSet};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Settings shared by the config file, the flags, and the `run.toml`
/// manifest written by `evolve`. Every field is optional; flags override
/// the file, and unset fields fall back to built-in defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub population: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generations: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_hidden: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constrained: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spike_objective: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_mut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent_selection: Option<ParentSelection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub landings: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_free: Option<bool>,
}

impl RunFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fills every field of `self` that is unset from `lower`.
    pub fn or(self, lower: RunFile) -> RunFile {
        RunFile {
            seed: self.seed.or(lower.seed),
            out: self.out.or(lower.out),
            jobs: self.jobs.or(lower.jobs),
            population: self.population.or(lower.population),
            generations: self.generations.or(lower.generations),
            n_hidden: self.n_hidden.or(lower.n_hidden),
            constrained: self.constrained.or(lower.constrained),
            spike_objective: self.spike_objective.or(lower.spike_objective),
            p_mut: self.p_mut.or(lower.p_mut),
            parent_selection: self.parent_selection.or(lower.parent_selection),
            landings: self.landings.or(lower.landings),
            h0: self.h0.or(lower.h0),
            noise_free: self.noise_free.or(lower.noise_free),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn landings(&self, default: usize) -> Result<usize, CliError> {
        positive("landings", self.landings.unwrap_or(default))
    }

    pub fn h0(&self) -> Result<f64, CliError> {
        let h0 = self.h0.unwrap_or(4.0);
        if h0.is_finite() && h0 > 0.0 {
            Ok(h0)
        } else {
            Err(CliError::Config(format!("h0 must be positive, got {h0}")))
        }
    }

    pub fn evolution(&self) -> Result<EvolutionConfig, CliError> {
        let defaults = EvolutionConfig::default();
        let config = EvolutionConfig {
            population: positive("population", self.population.unwrap_or(defaults.population))?,
            generations: positive("generations", self.generations.unwrap_or(defaults.generations) as usize)? as u32,
            n_hidden: self.n_hidden.unwrap_or(defaults.n_hidden),
            mutation: MutationConfig {
                p_mut: self.p_mut.unwrap_or(defaults.mutation.p_mut),
                constrained: self.constrained.unwrap_or(defaults.mutation.constrained),
            },
            objectives: if self.spike_objective.unwrap_or(true) {
                ObjectiveSet::ALL
            } else {
                ObjectiveSet::WITHOUT_SPIKES
            },
            parent_selection: self.parent_selection.unwrap_or(defaults.parent_selection),
            seed: self.seed(),
        };
        config.validate()?;
        Ok(config)
    }

    /// The manifest of an evolution run; loading it with `--config` replays
    /// the run exactly.
    pub fn manifest(config: &EvolutionConfig) -> RunFile {
        RunFile {
            seed: Some(config.seed),
            population: Some(config.population),
            generations: Some(config.generations),
            n_hidden: Some(config.n_hidden),
            constrained: Some(config.mutation.constrained),
            spike_objective: Some(config.objectives.spike_rate),
            p_mut: Some(config.mutation.p_mut),
            parent_selection: Some(config.parent_selection),
            ..RunFile::default()
        }
    }
}

fn positive(name: &str, value: usize) -> Result<usize, CliError> {
    if value == 0 {
        Err(CliError::Config(format!("{name} must be positive")))
    } else {
        Ok(value)
    }
}
