use crate::error::{Error, Result};
use crate::stats;

/// Distance between one tracked point pair in two consecutive frames, pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointPairSample {
    pub l_prev: f64,
    pub l_curr: f64,
}

/// Size divergence: mean relative shrinkage rate of the tracked pair distances.
pub fn size_divergence(pairs: &[PointPairSample], dt: f64) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("size divergence needs at least one point pair".into()));
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    if let Some(bad) = pairs.iter().find(|p| p.l_prev.is_nan() || p.l_prev <= 0.0) {
        return Err(Error::InvalidInput(format!("previous pair distance must be positive, got {}", bad.l_prev)));
    }
    let per_pair: Vec<f64> = pairs.iter().map(|p| (p.l_prev - p.l_curr) / p.l_prev / dt).collect();
    Ok(stats::shifted_mean(&per_pair))
}
