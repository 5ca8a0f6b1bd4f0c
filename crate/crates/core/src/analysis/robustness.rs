use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ControllerSpec;
use crate::env::{run_episode_with, sample_env_params, EnvParams, EpisodeResult};
use crate::error::Result;
use crate::evolution::{landing_objectives, ObjectiveVector};
use crate::seed::{self, tag};
use crate::stats;

/// Where the environment of each landing comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvSource {
    /// Independently randomized per landing.
    Randomized,
    /// The same parameters for every landing.
    Fixed(EnvParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessConfig {
    pub landings: usize,
    pub h0: f64,
    pub seed: u64,
    pub envs: EnvSource,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig { landings: 250, h0: 4.0, seed: 0, envs: EnvSource::Randomized }
    }
}

impl RobustnessConfig {
    /// Environment and noise stream of landing `k`; identical across controllers.
    pub(crate) fn landing(&self, k: usize) -> (EnvParams, seed::StreamRng) {
        let params = match self.envs {
            EnvSource::Randomized => sample_env_params(&mut seed::stream(self.seed, &[tag::ROBUSTNESS, k as u64, 0])),
            EnvSource::Fixed(p) => p,
        };
        (params, seed::stream(self.seed, &[tag::ROBUSTNESS, k as u64, 1]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSummary {
    pub median: f64,
    pub iqr: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub landings: usize,
    pub success_rate: f64,
    pub objectives: [ObjectiveSummary; 4],
    pub per_landing: Vec<ObjectiveVector>,
}

impl RobustnessReport {
    pub fn from_landings(per_landing: Vec<ObjectiveVector>, landed: usize) -> Self {
        let n = per_landing.len();
        let objectives = std::array::from_fn(|k| {
            let col: Vec<f64> = per_landing.iter().map(|o| o.0[k]).collect();
            ObjectiveSummary {
                median: stats::median(&col).unwrap_or(f64::NAN),
                iqr: stats::iqr(&col).unwrap_or(f64::NAN),
                min: col.iter().copied().fold(f64::INFINITY, f64::min),
                max: col.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        });
        RobustnessReport {
            landings: n,
            success_rate: if n == 0 { 0.0 } else { landed as f64 / n as f64 },
            objectives,
            per_landing,
        }
    }

    pub fn median_time(&self) -> f64 {
        self.objectives[0].median
    }

    pub fn median_speed(&self) -> f64 {
        self.objectives[2].median
    }

    pub fn median_spike_rate(&self) -> f64 {
        self.objectives[3].median
    }

    pub const CSV_HEADER: [&'static str; 10] = [
        "success_rate",
        "f1_median",
        "f1_iqr",
        "f2_median",
        "f2_iqr",
        "f3_median",
        "f3_iqr",
        "f4_median",
        "f4_iqr",
        "landings",
    ];

    pub fn csv_fields(&self) -> Vec<String> {
        let mut row = vec![self.success_rate.to_string()];
        for s in &self.objectives {
            row.push(s.median.to_string());
            row.push(s.iqr.to_string());
        }
        row.push(self.landings.to_string());
        row
    }

    /// Per-landing objectives as a table.
    pub fn write_landings_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["landing", "f1", "f2", "f3", "f4"])?;
        for (k, o) in self.per_landing.iter().enumerate() {
            let mut row = vec![k.to_string()];
            row.extend(o.0.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()
    }
}

pub(crate) fn run_landings(
    controller: &ControllerSpec,
    config: &RobustnessConfig,
    record: bool,
) -> Result<Vec<EpisodeResult>> {
    (0..config.landings)
        .into_par_iter()
        .map(|k| {
            let (params, mut rng) = config.landing(k);
            run_episode_with(controller.instantiate().as_mut(), config.h0, &params, &mut rng, record)
        })
        .collect()
}

/// Median and IQR of each objective over many independent landings.
pub fn evaluate_robustness(controller: &ControllerSpec, config: &RobustnessConfig) -> Result<RobustnessReport> {
    let results = run_landings(controller, config, false)?;
    let landed = results.iter().filter(|r| r.landed()).count();
    let per_landing = results.iter().map(|r| landing_objectives(r, config.h0)).collect();
    Ok(RobustnessReport::from_landings(per_landing, landed))
}
