use rand::Rng;
use serde::{Deserialize, Serialize};

/// One randomized environment. Times are in seconds, divergence in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvParams {
    /// Observation delay in whole control steps, at least 1.
    pub delay_steps: usize,
    pub sigma_d: f64,
    pub sigma_d_prop: f64,
    /// Rotor spin-up/down time constant.
    pub tau_thrust: f64,
    pub dt: f64,
    /// Probability of re-using the previous observation.
    pub p_jitter: f64,
    /// Wind standard deviation, m/s.
    pub sigma_wind: f64,
}

impl EnvParams {
    pub const DEFAULT_SIGMA_WIND: f64 = 0.1;

    /// A deterministic environment: no noise, jitter or wind.
    pub fn noise_free(dt: f64, tau_thrust: f64, delay_steps: usize) -> Self {
        EnvParams { delay_steps, sigma_d: 0.0, sigma_d_prop: 0.0, tau_thrust, dt, p_jitter: 0.0, sigma_wind: 0.0 }
    }

    pub fn is_valid(&self) -> bool {
        self.delay_steps >= 1
            && self.dt > 0.0
            && self.dt.is_finite()
            && self.tau_thrust >= 0.0
            && self.sigma_d >= 0.0
            && self.sigma_d_prop >= 0.0
            && self.sigma_wind >= 0.0
            && (0.0..=1.0).contains(&self.p_jitter)
    }
}

/// Draws an environment from the domain-randomization distributions.
pub fn sample_env_params<R: Rng + ?Sized>(rng: &mut R) -> EnvParams {
    EnvParams {
        delay_steps: rng.random_range(1..=4),
        sigma_d: rng.random_range(0.05..0.15),
        sigma_d_prop: rng.random_range(0.0..0.25),
        tau_thrust: rng.random_range(0.005..0.04),
        dt: rng.random_range(0.02..0.0333),
        p_jitter: rng.random_range(0.0..0.2),
        sigma_wind: EnvParams::DEFAULT_SIGMA_WIND,
    }
}
