use serde::{Deserialize, Serialize};

use crate::env::{Controller, GRAVITY};
use crate::error::Result;

/// Proportional divergence controller: `T_sp = K_p / g * (D - D_sp)`, clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PControllerSpec {
    pub k_p: f64,
    /// Divergence setpoint, 1/s.
    pub d_sp: f64,
    /// Output range in units of g.
    pub clamp: (f64, f64),
}

pub const P_SLOW: PControllerSpec = PControllerSpec { k_p: 0.98, d_sp: 2.5, clamp: (-0.2, 0.25) };
pub const P_FAST: PControllerSpec = PControllerSpec { k_p: 1.96, d_sp: 2.5, clamp: (-0.7, 0.3) };

pub fn p_controller(spec: &PControllerSpec, d_hat: f64) -> f64 {
    (spec.k_p / GRAVITY * (d_hat - spec.d_sp)).clamp(spec.clamp.0, spec.clamp.1)
}

#[derive(Debug, Clone)]
pub struct PController {
    spec: PControllerSpec,
}

impl PController {
    pub fn new(spec: PControllerSpec) -> Self {
        PController { spec }
    }
}

impl Controller for PController {
    fn reset(&mut self) {}

    fn act(&mut self, d_hat: f64, _dd_hat: f64) -> Result<f64> {
        Ok(p_controller(&self.spec, d_hat))
    }

    fn spike_counts(&self) -> &[u64] {
        &[]
    }
}
