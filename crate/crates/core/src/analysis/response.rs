use std::io::Write;

use rayon::prelude::*;

use super::robustness::{run_landings, EnvSource, RobustnessConfig};
use super::ControllerSpec;
use crate::env::SETTLE_TIME;
use crate::error::{Error, Result};
use crate::snn::{forward, Genome, NetworkState};
use crate::stats;

/// Steps of constant observation per grid point.
pub const STEADY_STATE_STEPS: usize = 100;
/// Trailing steps averaged into the steady-state value.
pub const STEADY_STATE_AVERAGED: usize = 50;

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Default observation grid: divergence in [-5, 5] 1/s and its derivative in
/// [-20, 20] 1/s^2, 101 points each.
pub fn default_grid() -> (Vec<f64>, Vec<f64>) {
    (linspace(-5.0, 5.0, 101), linspace(-20.0, 20.0, 101))
}

/// Steady-state thrust setpoint over an observation grid.
/// `values[i][j]` belongs to `d_axis[i]` and `dd_axis[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateMap {
    pub d_axis: Vec<f64>,
    pub dd_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SteadyStateMap {
    /// Row-major table; the header row holds the derivative axis, the first
    /// column the divergence axis.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["d_hat\\dd_hat".to_string()];
        header.extend(self.dd_axis.iter().map(f64::to_string));
        w.write_record(&header)?;
        for (d, row) in self.d_axis.iter().zip(&self.values) {
            let mut rec = vec![d.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()
    }
}

/// Holds each grid observation for 100 steps from a fresh network and
/// averages the setpoint over the last 50.
pub fn steady_state_response(genome: &Genome, d_axis: &[f64], dd_axis: &[f64]) -> Result<SteadyStateMap> {
    genome.validate()?;
    if d_axis.iter().chain(dd_axis).any(|x| !x.is_finite()) {
        return Err(Error::InvalidObservation("steady-state grid must be finite".into()));
    }
    let values = d_axis
        .par_iter()
        .map(|&d| {
            let mut state = NetworkState::new(genome);
            dd_axis
                .iter()
                .map(|&dd| {
                    state.reset();
                    let mut tail = Vec::with_capacity(STEADY_STATE_AVERAGED);
                    for step in 0..STEADY_STATE_STEPS {
                        let t_sp = forward(genome, &mut state, d, dd)?;
                        if step >= STEADY_STATE_STEPS - STEADY_STATE_AVERAGED {
                            tail.push(t_sp);
                        }
                    }
                    Ok(stats::shifted_mean(&tail))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SteadyStateMap { d_axis: d_axis.to_vec(), dd_axis: dd_axis.to_vec(), values })
}

/// Trailing moving average of `(x, y)` pairs: element `k` is the
/// mean of pairs `k..k + window`.
pub fn moving_average(samples: &[(f64, f64)], window: usize) -> Result<Vec<(f64, f64)>> {
    if window == 0 {
        return Err(Error::InvalidInput("moving-average window must be at least 1".into()));
    }
    if samples.len() < window {
        return Err(Error::InvalidInput(format!("{} samples are fewer than the window of {window}", samples.len())));
    }
    let w = window as f64;
    Ok(samples
        .windows(window)
        .map(|span| {
            let (sx, sy) = span.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
            (sx / w, sy / w)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientConfig {
    pub landings: usize,
    pub window: usize,
    pub h0: f64,
    pub seed: u64,
    pub envs: EnvSource,
}

impl Default for TransientConfig {
    fn default() -> Self {
        TransientConfig { landings: 100, window: 40, h0: 4.0, seed: 0, envs: EnvSource::Randomized }
    }
}

/// Observed divergence against commanded thrust, sorted by divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub samples: Vec<(f64, f64)>,
    /// Moving average over `window` consecutive sorted samples, as
    /// (mean divergence, mean setpoint).
    pub smoothed: Vec<(f64, f64)>,
    pub window: usize,
}

impl ResponseCurve {
    pub fn from_samples(mut samples: Vec<(f64, f64)>, window: usize) -> Result<Self> {
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let smoothed = moving_average(&samples, window)?;
        Ok(ResponseCurve { samples, smoothed, window })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["d_hat", "T_sp", "d_hat_smoothed", "T_sp_smoothed"])?;
        for (k, (d, t)) in self.samples.iter().enumerate() {
            let (sd, st) = self.smoothed.get(k).map(|(a, b)| (a.to_string(), b.to_string())).unwrap_or_default();
            w.write_record(&[d.to_string(), t.to_string(), sd, st])?;
        }
        w.flush()
    }
}

/// Records (observed divergence, applied setpoint) after the settle window
/// over many landings, then sorts and smooths them.
pub fn transient_response(controller: &ControllerSpec, config: &TransientConfig) -> Result<ResponseCurve> {
    if config.window == 0 {
        return Err(Error::InvalidInput("moving-average window must be at least 1".into()));
    }
    let landings = RobustnessConfig { landings: config.landings, h0: config.h0, seed: config.seed, envs: config.envs };
    let results = run_landings(controller, &landings, true)?;
    let samples: Vec<(f64, f64)> = results
        .iter()
        .flat_map(|r| r.trajectory.as_deref().unwrap_or(&[]))
        .filter(|row| row.t >= SETTLE_TIME - 1e-9)
        .map(|row| (row.d_hat, row.t_sp))
        .collect();
    ResponseCurve::from_samples(samples, config.window)
}
