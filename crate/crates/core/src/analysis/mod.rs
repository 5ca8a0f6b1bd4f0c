//! Post-evolution characterization of controllers.

mod activity;
mod baseline;
mod compare;
mod response;
mod robustness;

pub use activity::{record_activity, ActivityMap};
pub use baseline::{p_controller, PController, PControllerSpec, P_FAST, P_SLOW};
pub use compare::{compare, ComparisonRow};
pub use response::{
    default_grid, linspace, moving_average, steady_state_response, transient_response, ResponseCurve, SteadyStateMap,
    TransientConfig, STEADY_STATE_AVERAGED, STEADY_STATE_STEPS,
};
pub use robustness::{evaluate_robustness, EnvSource, ObjectiveSummary, RobustnessConfig, RobustnessReport};

use crate::env::{Controller, SnnController};
use crate::snn::Genome;

/// A controller under analysis: an evolved network or a proportional baseline.
#[derive(Debug, Clone, PartialEq)]
pub enum ControllerSpec {
    Snn(Genome),
    Proportional(PControllerSpec),
}

impl ControllerSpec {
    pub fn instantiate(&self) -> Box<dyn Controller + '_> {
        match self {
            ControllerSpec::Snn(g) => Box::new(SnnController::new(g)),
            ControllerSpec::Proportional(p) => Box::new(PController::new(*p)),
        }
    }
}
