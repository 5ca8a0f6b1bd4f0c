use rand::Rng;
use rand_distr::StandardNormal;

use super::dynamics::EnvState;
use super::params::EnvParams;

/// Produces the observed divergence and its finite-difference derivative.
///
/// The ground truth is taken `delay_steps` steps back from the delay line,
/// then additive and proportional Gaussian noise is applied. With probability
/// `p_jitter` the previous observation is repeated instead, never twice in a
/// row; a repeated step reports a zero derivative.
pub fn observe<R: Rng + ?Sized>(state: &mut EnvState, params: &EnvParams, rng: &mut R) -> (f64, f64) {
    let newest = state.d_history.len() - 1;
    let base = state.d_history[newest - params.delay_steps.min(newest)];

    let n_abs: f64 = rng.sample(StandardNormal);
    let n_prop: f64 = rng.sample(StandardNormal);
    let roll: f64 = rng.random();
    let fresh = base + params.sigma_d * n_abs + base * params.sigma_d_prop * n_prop;

    let prev = state.last_obs;
    let (d_hat, dd_hat) = if !state.held_last_step && roll < params.p_jitter {
        state.held_last_step = true;
        (prev, 0.0)
    } else {
        state.held_last_step = false;
        (fresh, (fresh - prev) / params.dt)
    };
    state.last_obs = d_hat;
    (d_hat, dd_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::dynamics::{dynamics_step, ground_truth_divergence};
    use crate::seed;

    #[test]
    fn noise_free_observation_is_delayed_ground_truth() {
        for delay in 1..=4 {
            let p = EnvParams::noise_free(0.025, 0.02, delay);
            let mut s = EnvState::with_velocity(6.0, -0.3, &p).unwrap();
            let mut rng = seed::stream(5, &[delay as u64]);
            let mut truth = vec![ground_truth_divergence(&s).unwrap(); delay];
            for k in 0..60 {
                truth.push(ground_truth_divergence(&s).unwrap());
                let (d_hat, _) = observe(&mut s, &p, &mut rng);
                assert_eq!(d_hat, truth[truth.len() - 1 - delay], "delay {delay}, step {k}");
                dynamics_step(&mut s, &p, -0.3, &mut rng);
                s.push_divergence().unwrap();
            }
        }
    }

    #[test]
    fn full_jitter_alternates() {
        let p = EnvParams { p_jitter: 1.0, ..EnvParams::noise_free(0.02, 0.02, 2) };
        let mut s = EnvState::with_velocity(4.0, -1.0, &p).unwrap();
        let mut rng = seed::stream(6, &[]);
        let mut held = Vec::new();
        for _ in 0..1000 {
            observe(&mut s, &p, &mut rng);
            held.push(s.held_last_step);
        }
        assert!(held.iter().step_by(2).all(|&h| h));
        assert!(held.iter().skip(1).step_by(2).all(|&h| !h));
    }

    #[test]
    fn held_step_repeats_value_with_zero_derivative() {
        let p = EnvParams { p_jitter: 1.0, sigma_d: 0.1, ..EnvParams::noise_free(0.02, 0.02, 1) };
        let mut s = EnvState::with_velocity(4.0, -1.0, &p).unwrap();
        let mut rng = seed::stream(7, &[]);
        let (first, d_first) = observe(&mut s, &p, &mut rng);
        assert_eq!((first, d_first), (0.25, 0.0));
        let (fresh, dd) = observe(&mut s, &p, &mut rng);
        assert!((dd - (fresh - first) / 0.02).abs() < 1e-12);
        let (again, dd) = observe(&mut s, &p, &mut rng);
        assert_eq!((again, dd), (fresh, 0.0));
    }
}
