//! Evolved spiking neural network controllers for optical-flow divergence
//! landings.
//!
//! - [`snn`]: encoders, adaptive LIF dynamics, spike-trace decoder.
//! - [`env`]: randomized vertical landing simulation.
//! - [`evolution`]: mutation-only NSGA-II with a Pareto hall of fame.
//! - [`analysis`]: robustness statistics, response curves, activity maps,
//!   proportional-controller baselines.
//! - [`persist`]: genome, archive and report files.

pub mod analysis;
pub mod env;
pub mod error;
pub mod evolution;
pub mod persist;
pub mod seed;
pub mod snn;
pub mod stats;

pub use error::{Error, Result};
pub use evolution::{EvolutionConfig, Individual, ObjectiveSet, ObjectiveVector, ParetoArchive};
pub use snn::{Genome, NetworkState};
