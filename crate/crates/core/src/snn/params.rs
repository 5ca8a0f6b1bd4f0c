use serde::{Deserialize, Serialize};

/// Lower bound of the thrust setpoint, in units of g.
pub const THRUST_MIN_G: f64 = -0.8;
/// Upper bound of the thrust setpoint, in units of g.
pub const THRUST_MAX_G: f64 = 0.5;

/// Per-neuron hyperparameters.
///
/// Plain LIF neurons only read `alpha_u`, `tau_u` and `theta_init`; the
/// threshold gain and decay are carried so every neuron has the same gene set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronParams {
    pub alpha_u: f64,
    pub tau_u: f64,
    pub alpha_theta: f64,
    pub tau_theta: f64,
    pub theta_init: f64,
}

impl NeuronParams {
    pub const INITIAL: NeuronParams =
        NeuronParams { alpha_u: 0.2, tau_u: 0.8, alpha_theta: 0.2, tau_theta: 0.8, theta_init: 0.2 };

    pub fn in_bounds(&self) -> bool {
        let gain = 0.0..=2.0;
        let unit = 0.0..=1.0;
        gain.contains(&self.alpha_u)
            && gain.contains(&self.alpha_theta)
            && unit.contains(&self.tau_u)
            && unit.contains(&self.tau_theta)
            && unit.contains(&self.theta_init)
    }
}

impl Default for NeuronParams {
    fn default() -> Self {
        Self::INITIAL
    }
}

/// Spike-trace decoder mapping the output neuron's trace onto `[r1, r2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderParams {
    pub alpha_x: f64,
    pub tau_x: f64,
    pub r1: f64,
    pub r2: f64,
}

impl DecoderParams {
    pub const INITIAL: DecoderParams = DecoderParams { alpha_x: 1.0, tau_x: 0.8, r1: THRUST_MIN_G, r2: THRUST_MAX_G };

    /// `r1 == r2` is accepted: it pins the action to a constant.
    pub fn in_bounds(&self) -> bool {
        (0.0..=2.0).contains(&self.alpha_x)
            && (0.0..=1.0).contains(&self.tau_x)
            && self.r1.is_finite()
            && self.r2.is_finite()
            && self.r1 <= self.r2
    }
}

impl Default for DecoderParams {
    fn default() -> Self {
        Self::INITIAL
    }
}
