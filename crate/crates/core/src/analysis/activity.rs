use std::io::Write;

use super::robustness::{run_landings, EnvSource, RobustnessConfig};
use super::ControllerSpec;
use crate::error::Result;
use crate::snn::Genome;

/// Average firing rate of every spiking neuron, with the weights needed to
/// draw the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityMap {
    /// Hidden neurons in order, then the output neuron; Hz.
    pub rates: Vec<f64>,
    pub w_in: Vec<Vec<f64>>,
    pub w_out: Vec<f64>,
    pub episodes: usize,
}

impl ActivityMap {
    pub fn total_rate(&self) -> f64 {
        self.rates.iter().sum()
    }

    /// One row per synapse and per neuron, suitable for plotting.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["kind", "source", "target", "value"])?;
        let n_hidden = self.w_out.len();
        for (k, rate) in self.rates.iter().enumerate() {
            let name = if k == n_hidden { "output".to_string() } else { format!("hidden{k}") };
            w.write_record(["rate", "", name.as_str(), rate.to_string().as_str()])?;
        }
        const INPUT_NAMES: [&str; 4] = ["D+", "D-", "dD+", "dD-"];
        for (i, row) in self.w_in.iter().enumerate() {
            for (j, weight) in row.iter().enumerate() {
                let target = if n_hidden == 0 { "output".to_string() } else { format!("hidden{j}") };
                w.write_record(["weight", INPUT_NAMES[i], target.as_str(), weight.to_string().as_str()])?;
            }
        }
        for (j, weight) in self.w_out.iter().enumerate() {
            w.write_record(["weight", format!("hidden{j}").as_str(), "output", weight.to_string().as_str()])?;
        }
        w.flush()
    }
}

/// Per-neuron spike count over episode duration, averaged over `episodes`
/// randomized landings from `h0`. The rates sum to the episode-averaged
/// network spike rate.
pub fn record_activity(genome: &Genome, episodes: usize, h0: f64, seed: u64) -> Result<ActivityMap> {
    genome.validate()?;
    let spec = ControllerSpec::Snn(genome.clone());
    let config = RobustnessConfig { landings: episodes, h0, seed, envs: EnvSource::Randomized };
    let results = run_landings(&spec, &config, false)?;
    let mut rates = vec![0.0; genome.spiking_neurons()];
    for r in &results {
        if r.duration > 0.0 {
            for (acc, &count) in rates.iter_mut().zip(&r.neuron_spikes) {
                *acc += count as f64 / r.duration;
            }
        }
    }
    let n = results.len().max(1) as f64;
    rates.iter_mut().for_each(|r| *r /= n);
    Ok(ActivityMap { rates, w_in: genome.w_in.clone(), w_out: genome.w_out.clone(), episodes })
}
