use serde::{Deserialize, Serialize};

use crate::env::{EpisodeResult, Outcome, CEILING_MARGIN, MAX_EPISODE_TIME};

/// Time-to-land charged for a landing that never touches down, s.
pub const PUNISHED_TIME: f64 = 2.0 * MAX_EPISODE_TIME;
/// Minimum touchdown speed charged for a landing that never touches down, m/s.
pub const PUNISHED_SPEED: f64 = 5.0;

/// Fitness objectives, all minimized: time to land (s), final height (m),
/// final vertical speed (m/s) and total network spike rate (Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector(pub [f64; 4]);

impl ObjectiveVector {
    pub const NAMES: [&'static str; 4] = ["f1", "f2", "f3", "f4"];

    pub fn time_to_land(&self) -> f64 {
        self.0[0]
    }

    pub fn final_height(&self) -> f64 {
        self.0[1]
    }

    pub fn final_speed(&self) -> f64 {
        self.0[2]
    }

    pub fn spike_rate(&self) -> f64 {
        self.0[3]
    }

    pub fn as_array(&self) -> &[f64; 4] {
        &self.0
    }

    /// Component-wise mean.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a ObjectiveVector>) -> ObjectiveVector {
        let mut sum = [0.0; 4];
        let mut n = 0usize;
        for v in items {
            sum.iter_mut().zip(&v.0).for_each(|(s, x)| *s += x);
            n += 1;
        }
        ObjectiveVector(sum.map(|s| s / n.max(1) as f64))
    }
}

/// Which objectives take part in dominance comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveSet {
    pub spike_rate: bool,
}

impl ObjectiveSet {
    pub const ALL: ObjectiveSet = ObjectiveSet { spike_rate: true };
    pub const WITHOUT_SPIKES: ObjectiveSet = ObjectiveSet { spike_rate: false };

    pub fn len(&self) -> usize {
        if self.spike_rate {
            4
        } else {
            3
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn project<'a>(&self, v: &'a ObjectiveVector) -> &'a [f64] {
        &v.0[..self.len()]
    }

    pub fn names(&self) -> &'static [&'static str] {
        &ObjectiveVector::NAMES[..self.len()]
    }
}

impl Default for ObjectiveSet {
    fn default() -> Self {
        Self::ALL
    }
}

/// Pareto dominance for minimization: no worse everywhere, better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strictly |= x < y;
    }
    strictly
}

/// Scores one landing from `h0`, punishing episodes that do not touch down.
pub fn landing_objectives(result: &EpisodeResult, h0: f64) -> ObjectiveVector {
    let spike_rate = result.spike_rate();
    match result.outcome {
        Outcome::Landed => {
            ObjectiveVector([result.duration, result.final_h.max(0.0), result.final_v.abs(), spike_rate])
        }
        Outcome::Flyaway => {
            ObjectiveVector([PUNISHED_TIME, h0 + CEILING_MARGIN, result.final_v.abs().max(PUNISHED_SPEED), spike_rate])
        }
        Outcome::Timeout => ObjectiveVector([
            PUNISHED_TIME,
            result.final_h.max(0.0),
            result.final_v.abs().max(PUNISHED_SPEED),
            spike_rate,
        ]),
    }
}
