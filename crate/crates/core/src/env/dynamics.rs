use std::collections::VecDeque;

use rand::Rng;
use rand_distr::StandardNormal;

use super::params::EnvParams;
use crate::error::{Error, Result};

pub const GRAVITY: f64 = 9.81;

/// Physical and sensing state of one landing.
///
/// `thrust` is the net vertical acceleration relative to hover, m/s^2.
/// `d_history` holds ground-truth divergence, newest last.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    pub h: f64,
    pub v: f64,
    pub thrust: f64,
    pub wind: f64,
    pub t: f64,
    pub d_history: VecDeque<f64>,
    pub last_obs: f64,
    pub held_last_step: bool,
}

impl EnvState {
    /// At rest at altitude `h0`, with the divergence history pre-filled.
    pub fn new(h0: f64, params: &EnvParams) -> Result<Self> {
        Self::with_velocity(h0, 0.0, params)
    }

    pub fn with_velocity(h0: f64, v0: f64, params: &EnvParams) -> Result<Self> {
        let d0 = ground_truth_divergence_at(h0, v0)?;
        Ok(EnvState {
            h: h0,
            v: v0,
            thrust: 0.0,
            wind: 0.0,
            t: 0.0,
            d_history: std::iter::repeat_n(d0, params.delay_steps + 1).collect(),
            last_obs: d0,
            held_last_step: false,
        })
    }

    /// Appends the current ground-truth divergence to the delay line.
    pub fn push_divergence(&mut self) -> Result<()> {
        let d = ground_truth_divergence(self)?;
        self.d_history.push_back(d);
        self.d_history.pop_front();
        Ok(())
    }
}

fn ground_truth_divergence_at(h: f64, v: f64) -> Result<f64> {
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidState(format!("divergence undefined at h = {h}")));
    }
    // Positive while descending.
    Ok(-v / h)
}

pub fn ground_truth_divergence(state: &EnvState) -> Result<f64> {
    ground_truth_divergence_at(state.h, state.v)
}

/// Advances the vehicle by one step under thrust setpoint `t_sp_g` (units of g).
///
/// Wind is updated first; altitude then uses the previous velocity and
/// velocity the previous thrust, as in a forward-Euler update.
pub fn dynamics_step<R: Rng + ?Sized>(state: &mut EnvState, params: &EnvParams, t_sp_g: f64, rng: &mut R) {
    let dt = params.dt;
    let gust: f64 = rng.sample::<f64, _>(StandardNormal) * params.sigma_wind;
    state.wind += dt * (gust - state.wind) / (dt + params.sigma_wind);

    let (v_prev, thrust_prev) = (state.v, state.thrust);
    state.h += dt * v_prev;
    state.v = v_prev + dt * thrust_prev + state.wind;
    state.thrust = thrust_prev + dt * (t_sp_g * GRAVITY - thrust_prev) / (dt + params.tau_thrust);
    state.t += dt;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use proptest::prelude::*;

    fn calm(dt: f64, tau: f64) -> EnvParams {
        EnvParams::noise_free(dt, tau, 1)
    }

    #[test]
    fn zero_forcing_step() {
        let p = calm(0.02, 0.02);
        let mut s = EnvState::with_velocity(4.0, -1.0, &p).unwrap();
        dynamics_step(&mut s, &p, 0.0, &mut seed::stream(0, &[]));
        assert!((s.h - 3.98).abs() <= 1e-12 * 3.98);
        assert_eq!(s.v, -1.0);
        assert_eq!(s.t, 0.02);
    }

    #[test]
    fn thrust_lag_step() {
        // T = 0 + 0.02 * (0.5 * 9.81 - 0) / (0.02 + 0.02) = 2.4525
        let p = calm(0.02, 0.02);
        let mut s = EnvState::new(4.0, &p).unwrap();
        dynamics_step(&mut s, &p, 0.5, &mut seed::stream(0, &[]));
        assert!((s.thrust - 2.4525).abs() <= 1e-12 * 2.4525);
    }

    #[test]
    fn no_wind_without_sigma() {
        let p = calm(0.025, 0.01);
        let mut s = EnvState::new(4.0, &p).unwrap();
        let mut rng = seed::stream(1, &[]);
        for _ in 0..1000 {
            dynamics_step(&mut s, &p, 0.0, &mut rng);
            assert_eq!(s.wind, 0.0);
        }
    }

    #[test]
    fn divergence_sign_convention() {
        let p = calm(0.02, 0.02);
        let at = |h, v| ground_truth_divergence(&EnvState::with_velocity(h, v, &p).unwrap()).unwrap();
        assert_eq!(at(4.0, -2.0), 0.5);
        assert_eq!(at(3.0, 0.0), 0.0);
        assert_eq!(at(2.0, 1.0), -0.5);
        let mut s = EnvState::new(1.0, &p).unwrap();
        s.h = 0.0;
        assert!(matches!(ground_truth_divergence(&s), Err(Error::InvalidState(_))));
    }

    proptest! {
        #[test]
        fn hover_is_affine(h0 in 0.5..10.0f64, v0 in -3.0..3.0f64, dt in 0.02..0.0333f64, n in 1usize..300) {
            let p = calm(dt, 0.02);
            let mut s = EnvState::with_velocity(h0, v0, &p).unwrap();
            let mut rng = seed::stream(2, &[]);
            let mut h = h0;
            for _ in 0..n {
                dynamics_step(&mut s, &p, 0.0, &mut rng);
                h += dt * v0;
                prop_assert_eq!(s.v, v0);
            }
            prop_assert!((s.h - h).abs() <= 1e-9);
        }

        #[test]
        fn thrust_lag_converges_geometrically(
            t_sp in -0.8..0.5f64, dt in 0.02..0.0333f64, tau in 0.005..0.04f64, n in 1usize..100,
        ) {
            let p = calm(dt, tau);
            let mut s = EnvState::new(5.0, &p).unwrap();
            let mut rng = seed::stream(3, &[]);
            let target = t_sp * GRAVITY;
            let ratio = 1.0 - dt / (dt + tau);
            let mut prev_err = (s.thrust - target).abs();
            for _ in 0..n {
                dynamics_step(&mut s, &p, t_sp, &mut rng);
                let err = (s.thrust - target).abs();
                prop_assert!(err <= prev_err);
                prop_assert!((err - prev_err * ratio).abs() <= 1e-12 * target.abs().max(1.0));
                prev_err = err;
            }
        }
    }
}
