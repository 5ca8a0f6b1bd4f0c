use serde::{Deserialize, Serialize};

use super::params::{DecoderParams, NeuronParams};
use crate::error::{Error, Result};

/// Number of non-spiking encoder neurons: (D+, D-, dD+, dD-).
pub const INPUTS: usize = 4;
pub const MAX_HIDDEN: usize = 20;

/// Heritable description of a feed-forward SNN controller.
///
/// `w_in` has one row per encoder neuron. Each row has `n_hidden` entries,
/// or a single entry when `n_hidden == 0`, in which case the encoders drive
/// the output neuron directly and `w_out` is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub n_hidden: usize,
    pub w_in: Vec<Vec<f64>>,
    pub w_out: Vec<f64>,
    pub hidden_params: Vec<NeuronParams>,
    pub output_params: NeuronParams,
    pub decoder: DecoderParams,
}

impl Genome {
    /// Genome with every weight set to `weight` and initial hyperparameters.
    pub fn uniform(n_hidden: usize, weight: f64) -> Self {
        let cols = n_hidden.max(1);
        Genome {
            n_hidden,
            w_in: vec![vec![weight; cols]; INPUTS],
            w_out: vec![weight; n_hidden],
            hidden_params: vec![NeuronParams::INITIAL; n_hidden],
            output_params: NeuronParams::INITIAL,
            decoder: DecoderParams::INITIAL,
        }
    }

    pub fn zeros(n_hidden: usize) -> Self {
        Self::uniform(n_hidden, 0.0)
    }

    /// Columns of `w_in`: hidden neurons, or the output neuron for 0-hidden nets.
    pub fn input_targets(&self) -> usize {
        self.n_hidden.max(1)
    }

    /// Spiking neurons: hidden layer plus the output neuron.
    pub fn spiking_neurons(&self) -> usize {
        self.n_hidden + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_hidden > MAX_HIDDEN {
            return Err(Error::Config(format!("n_hidden = {} exceeds {MAX_HIDDEN}", self.n_hidden)));
        }
        let cols = self.input_targets();
        if self.w_in.len() != INPUTS || self.w_in.iter().any(|row| row.len() != cols) {
            return Err(Error::Config(format!("w_in must be {INPUTS} x {cols} for n_hidden = {}", self.n_hidden)));
        }
        if self.w_out.len() != self.n_hidden {
            return Err(Error::Config(format!("w_out has {} entries, expected {}", self.w_out.len(), self.n_hidden)));
        }
        if self.hidden_params.len() != self.n_hidden {
            return Err(Error::Config(format!(
                "{} hidden parameter sets for {} hidden neurons",
                self.hidden_params.len(),
                self.n_hidden
            )));
        }
        let weights_finite = self.w_in.iter().flatten().chain(&self.w_out).all(|w| w.is_finite());
        if !weights_finite {
            return Err(Error::Config("non-finite synaptic weight".into()));
        }
        if !self.hidden_params.iter().all(NeuronParams::in_bounds) || !self.output_params.in_bounds() {
            return Err(Error::Config("neuron hyperparameter out of range".into()));
        }
        if !self.decoder.in_bounds() {
            return Err(Error::Config("decoder parameter out of range".into()));
        }
        Ok(())
    }
}
