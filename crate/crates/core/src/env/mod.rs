//! Randomized vertical landing environment.
//!
//! Unit-mass vertical dynamics with first-order thrust lag and a wind
//! perturbation, a delayed and noisy divergence observation with jitter, and
//! the episode runner that closes the loop around a [`Controller`].

mod divergence;
mod dynamics;
mod episode;
mod observe;
mod params;

pub use divergence::{size_divergence, PointPairSample};
pub use dynamics::{dynamics_step, ground_truth_divergence, EnvState, GRAVITY};
pub use episode::{
    run_episode, run_episode_with, write_trajectory_csv, Controller, EpisodeResult, Outcome, SnnController,
    TrajectoryRow, CEILING_MARGIN, LANDING_HEIGHT, MAX_EPISODE_TIME, SETTLE_TIME,
};
pub use observe::observe;
pub use params::{sample_env_params, EnvParams};
