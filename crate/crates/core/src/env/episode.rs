use std::io::Write;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dynamics::{dynamics_step, ground_truth_divergence, EnvState};
use super::observe::observe;
use super::params::EnvParams;
use crate::error::{Error, Result};
use crate::snn::{forward, Genome, NetworkState, THRUST_MAX_G, THRUST_MIN_G};

/// Altitude at or below which the vehicle counts as landed, m.
pub const LANDING_HEIGHT: f64 = 0.05;
/// The episode ends as a flyaway at `h0 + CEILING_MARGIN`, m.
pub const CEILING_MARGIN: f64 = 5.0;
pub const MAX_EPISODE_TIME: f64 = 30.0;
/// Initial window during which the controller observes but has no authority.
pub const SETTLE_TIME: f64 = 0.5;

const TIME_EPS: f64 = 1e-9;

/// Anything that maps a divergence observation to a thrust setpoint in g.
pub trait Controller {
    fn reset(&mut self);
    fn act(&mut self, d_hat: f64, dd_hat: f64) -> Result<f64>;
    /// Cumulative spikes per spiking neuron since the last reset.
    fn spike_counts(&self) -> &[u64];
}

pub struct SnnController<'g> {
    genome: &'g Genome,
    state: NetworkState,
}

impl<'g> SnnController<'g> {
    pub fn new(genome: &'g Genome) -> Self {
        SnnController { genome, state: NetworkState::new(genome) }
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }
}

impl Controller for SnnController<'_> {
    fn reset(&mut self) {
        self.state.reset();
    }

    fn act(&mut self, d_hat: f64, dd_hat: f64) -> Result<f64> {
        forward(self.genome, &mut self.state, d_hat, dd_hat)
    }

    fn spike_counts(&self) -> &[u64] {
        &self.state.spike_counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Landed,
    Flyaway,
    Timeout,
}

/// One control step: the state at `t` and the decision taken there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub h: f64,
    pub v: f64,
    pub thrust: f64,
    pub t_sp: f64,
    pub divergence: f64,
    pub d_hat: f64,
    pub dd_hat: f64,
    pub spikes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub outcome: Outcome,
    pub duration: f64,
    pub final_h: f64,
    pub final_v: f64,
    pub total_spikes: u64,
    pub neuron_spikes: Vec<u64>,
    pub trajectory: Option<Vec<TrajectoryRow>>,
}

impl EpisodeResult {
    pub fn landed(&self) -> bool {
        self.outcome == Outcome::Landed
    }

    /// Spikes per second of simulated time.
    pub fn spike_rate(&self) -> f64 {
        if self.duration > 0.0 {
            self.total_spikes as f64 / self.duration
        } else {
            0.0
        }
    }
}

/// Runs one landing of an SNN controller.
pub fn run_episode<R: Rng + ?Sized>(
    genome: &Genome,
    h0: f64,
    params: &EnvParams,
    rng: &mut R,
    record: bool,
) -> Result<EpisodeResult> {
    run_episode_with(&mut SnnController::new(genome), h0, params, rng, record)
}

/// Runs one landing from rest at `h0` until touchdown, flyaway or timeout.
pub fn run_episode_with<C, R>(
    controller: &mut C,
    h0: f64,
    params: &EnvParams,
    rng: &mut R,
    record: bool,
) -> Result<EpisodeResult>
where
    C: Controller + ?Sized,
    R: Rng + ?Sized,
{
    if !h0.is_finite() || h0 <= LANDING_HEIGHT {
        return Err(Error::InvalidInput(format!("initial altitude {h0} must exceed {LANDING_HEIGHT} m")));
    }
    if !params.is_valid() {
        return Err(Error::InvalidInput(format!("invalid environment parameters {params:?}")));
    }
    let ceiling = h0 + CEILING_MARGIN;
    let mut state = EnvState::new(h0, params)?;
    controller.reset();
    let mut trajectory = record.then(Vec::new);

    let outcome = loop {
        if state.t + params.dt > MAX_EPISODE_TIME + TIME_EPS {
            break Outcome::Timeout;
        }
        let (d_hat, dd_hat) = observe(&mut state, params, rng);
        let spikes_before: u64 = controller.spike_counts().iter().sum();
        let action = controller.act(d_hat, dd_hat)?;
        let t_sp = if state.t < SETTLE_TIME - TIME_EPS { 0.0 } else { action.clamp(THRUST_MIN_G, THRUST_MAX_G) };
        if let Some(rows) = trajectory.as_mut() {
            rows.push(TrajectoryRow {
                t: state.t,
                h: state.h,
                v: state.v,
                thrust: state.thrust,
                t_sp,
                divergence: ground_truth_divergence(&state)?,
                d_hat,
                dd_hat,
                spikes: controller.spike_counts().iter().sum::<u64>() - spikes_before,
            });
        }
        dynamics_step(&mut state, params, t_sp, rng);
        if state.h <= LANDING_HEIGHT {
            break Outcome::Landed;
        }
        if state.h >= ceiling {
            break Outcome::Flyaway;
        }
        state.push_divergence()?;
    };

    let neuron_spikes = controller.spike_counts().to_vec();
    Ok(EpisodeResult {
        outcome,
        duration: state.t,
        final_h: state.h,
        final_v: state.v,
        total_spikes: neuron_spikes.iter().sum(),
        neuron_spikes,
        trajectory,
    })
}

/// Writes a trajectory as a comma-separated table with a header row.
pub fn write_trajectory_csv<W: Write>(rows: &[TrajectoryRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "h", "v", "T", "T_sp", "D", "d_hat", "dd_hat", "spikes_this_step"])?;
    for r in rows {
        w.write_record(&[
            r.t.to_string(),
            r.h.to_string(),
            r.v.to_string(),
            r.thrust.to_string(),
            r.t_sp.to_string(),
            r.divergence.to_string(),
            r.d_hat.to_string(),
            r.dd_hat.to_string(),
            r.spikes.to_string(),
        ])?;
    }
    w.flush()
}

impl EpisodeResult {
    pub fn save_trajectory(&self, path: &Path) -> Result<()> {
        let rows = self.trajectory.as_deref().unwrap_or(&[]);
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        write_trajectory_csv(rows, file).map_err(|e| Error::io(path, e))
    }
}
