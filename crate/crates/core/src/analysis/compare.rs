use std::io::Write;

use super::robustness::{evaluate_robustness, RobustnessConfig};
use super::ControllerSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub success_rate: f64,
    pub median_time: f64,
    pub median_speed: f64,
    pub median_spike_rate: f64,
}

impl ComparisonRow {
    pub fn write_csv<W: Write>(rows: &[ComparisonRow], out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["controller", "success_rate", "median_time_s", "median_touchdown_speed", "median_spike_rate"])?;
        for r in rows {
            w.write_record(&[
                r.name.clone(),
                r.success_rate.to_string(),
                r.median_time.to_string(),
                r.median_speed.to_string(),
                r.median_spike_rate.to_string(),
            ])?;
        }
        w.flush()
    }
}

/// Lands every controller on the same sequence of environments and noise
/// streams and tabulates median time to land and touchdown speed.
pub fn compare(controllers: &[(String, ControllerSpec)], config: &RobustnessConfig) -> Result<Vec<ComparisonRow>> {
    if controllers.len() < 2 {
        return Err(Error::InvalidInput("comparison needs at least two controllers".into()));
    }
    controllers
        .iter()
        .map(|(name, spec)| {
            let r = evaluate_robustness(spec, config)?;
            Ok(ComparisonRow {
                name: name.clone(),
                success_rate: r.success_rate,
                median_time: r.median_time(),
                median_speed: r.median_speed(),
                median_spike_rate: r.median_spike_rate(),
            })
        })
        .collect()
}
