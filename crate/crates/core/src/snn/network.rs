use super::genome::{Genome, INPUTS};
use super::params::{DecoderParams, NeuronParams};
use crate::error::{Error, Result};

/// Currents from the two encoder pairs, ordered (D+, D-, dD+, dD-).
pub type InputCurrents = [f64; INPUTS];

/// Splits each observation into a positive and a negative current.
pub fn encode(d_hat: f64, dd_hat: f64) -> Result<InputCurrents> {
    if !d_hat.is_finite() || !dd_hat.is_finite() {
        return Err(Error::InvalidObservation(format!("divergence ({d_hat}, {dd_hat}) is not finite")));
    }
    let split = |o: f64| (o.max(0.0).abs(), o.min(0.0).abs());
    let (d_pos, d_neg) = split(d_hat);
    let (dd_pos, dd_neg) = split(dd_hat);
    Ok([d_pos, d_neg, dd_pos, dd_neg])
}

/// Membrane potential and firing threshold of one spiking neuron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronState {
    pub u: f64,
    pub theta: f64,
}

/// Advances one neuron by a single step and reports whether it fired.
///
/// The membrane resets to zero after a spike. When `adaptive`, the threshold
/// decays and is bumped by the spike emitted in this same step; otherwise it
/// is left untouched.
#[inline]
pub fn lif_step(state: &mut NeuronState, params: &NeuronParams, forcing: f64, adaptive: bool) -> bool {
    state.u = state.u * params.tau_u + params.alpha_u * forcing;
    let spike = state.u > state.theta;
    if spike {
        state.u = 0.0;
    }
    if adaptive {
        state.theta = state.theta * params.tau_theta + params.alpha_theta * f64::from(u8::from(spike));
    }
    spike
}

/// Updates the output trace with the current spike, then scales it to an action.
#[inline]
pub fn decode(trace: &mut f64, decoder: &DecoderParams, spike: bool) -> f64 {
    *trace = *trace * decoder.tau_x + decoder.alpha_x * f64::from(u8::from(spike));
    let action = decoder.r1 + (decoder.r2 - decoder.r1) * *trace;
    action.clamp(decoder.r1, decoder.r2)
}

/// Runtime state of a network. Index `n_hidden` is the output neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub neurons: Vec<NeuronState>,
    pub spikes: Vec<bool>,
    pub x_out: f64,
    pub spike_counts: Vec<u64>,
    theta_init: Vec<f64>,
}

impl NetworkState {
    pub fn new(genome: &Genome) -> Self {
        let theta_init: Vec<f64> =
            genome.hidden_params.iter().chain(std::iter::once(&genome.output_params)).map(|p| p.theta_init).collect();
        let n = theta_init.len();
        let mut state = NetworkState {
            neurons: vec![NeuronState { u: 0.0, theta: 0.0 }; n],
            spikes: vec![false; n],
            x_out: 0.0,
            spike_counts: vec![0; n],
            theta_init,
        };
        state.reset();
        state
    }

    /// Back to rest: zero membranes and trace, initial thresholds, cleared counts.
    pub fn reset(&mut self) {
        for (neuron, &theta) in self.neurons.iter_mut().zip(&self.theta_init) {
            *neuron = NeuronState { u: 0.0, theta };
        }
        self.spikes.fill(false);
        self.spike_counts.fill(0);
        self.x_out = 0.0;
    }

    pub fn total_spikes(&self) -> u64 {
        self.spike_counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }
}

/// One synchronous step: encode, hidden adaptive-LIF layer, output LIF, decode.
///
/// Returns the thrust setpoint in units of g, within the decoder's range.
pub fn forward(genome: &Genome, state: &mut NetworkState, d_hat: f64, dd_hat: f64) -> Result<f64> {
    let n_hidden = genome.n_hidden;
    if state.len() != n_hidden + 1 {
        return Err(Error::Config(format!("network state has {} neurons, genome needs {}", state.len(), n_hidden + 1)));
    }
    let currents = encode(d_hat, dd_hat)?;

    let output_forcing = if n_hidden == 0 {
        currents.iter().zip(&genome.w_in).map(|(c, row)| c * row[0]).sum::<f64>()
    } else {
        for j in 0..n_hidden {
            let forcing: f64 = currents.iter().zip(&genome.w_in).map(|(c, row)| c * row[j]).sum();
            let spike = lif_step(&mut state.neurons[j], &genome.hidden_params[j], forcing, true);
            state.spikes[j] = spike;
            state.spike_counts[j] += u64::from(spike);
        }
        state.spikes[..n_hidden].iter().zip(&genome.w_out).filter(|(s, _)| **s).map(|(_, w)| w).sum::<f64>()
    };

    let out = n_hidden;
    let spike = lif_step(&mut state.neurons[out], &genome.output_params, output_forcing, false);
    state.spikes[out] = spike;
    state.spike_counts[out] += u64::from(spike);
    Ok(decode(&mut state.x_out, &genome.decoder, spike))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-12;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(0.5, 0.0).unwrap(), [0.5, 0.0, 0.0, 0.0]);
        assert_eq!(encode(-0.3, 0.2).unwrap(), [0.0, 0.3, 0.2, 0.0]);
        assert_eq!(encode(0.0, 0.0).unwrap(), [0.0; 4]);
    }

    #[test]
    fn encode_rejects_non_finite() {
        assert!(matches!(encode(f64::NAN, 0.0), Err(Error::InvalidObservation(_))));
        assert!(matches!(encode(0.0, f64::INFINITY), Err(Error::InvalidObservation(_))));
    }

    #[test]
    fn lif_pure_decay() {
        let mut n = NeuronState { u: 1.0, theta: 2.0 };
        let p = NeuronParams { tau_u: 0.8, ..NeuronParams::INITIAL };
        assert!(!lif_step(&mut n, &p, 0.0, false));
        assert!(rel(n.u, 0.8) <= EPS);
    }

    #[test]
    fn lif_spike_and_reset() {
        // u = 0*0.8 + 0.2*2.0 = 0.4 > 0.2
        let mut n = NeuronState { u: 0.0, theta: 0.2 };
        assert!(lif_step(&mut n, &NeuronParams::INITIAL, 2.0, false));
        assert_eq!(n.u, 0.0);
        assert_eq!(n.theta, 0.2);
    }

    #[test]
    fn lif_threshold_adapts_on_spike() {
        // theta = 0.2*0.8 + 0.2*1 = 0.36
        let mut n = NeuronState { u: 0.0, theta: 0.2 };
        assert!(lif_step(&mut n, &NeuronParams::INITIAL, 2.0, true));
        assert!(rel(n.theta, 0.36) <= EPS);
    }

    #[test]
    fn lif_equality_does_not_spike() {
        let p = NeuronParams { alpha_u: 1.0, tau_u: 0.0, ..NeuronParams::INITIAL };
        let mut n = NeuronState { u: 0.0, theta: 0.5 };
        assert!(!lif_step(&mut n, &p, 0.5, false));
        assert_eq!(n.u, 0.5);
    }

    #[test]
    fn decode_examples() {
        let d = DecoderParams::INITIAL;
        let mut x = 0.0;
        assert_eq!(decode(&mut x, &d, false), -0.8);

        let mut x = 5.0;
        assert_eq!(decode(&mut x, &d, false), 0.5);

        // X = 0.5*0.8 + 1.0 = 1.4 -> -0.8 + 1.3*1.4 = 1.02 -> clamp 0.5
        let mut x = 0.5;
        assert_eq!(decode(&mut x, &d, true), 0.5);
        assert!(rel(x, 1.4) <= EPS);
    }

    #[test]
    fn zero_weights_never_act() {
        let g = Genome::zeros(5);
        let mut s = NetworkState::new(&g);
        for k in 0..200 {
            let d = (k as f64 * 0.37).sin() * 10.0;
            assert_eq!(forward(&g, &mut s, d, -d).unwrap(), -0.8);
        }
        assert_eq!(s.total_spikes(), 0);
    }

    #[test]
    fn single_neuron_hand_stepped() {
        // 0-hidden net, only the D+ encoder connected with w = 1, d_hat = 0.5:
        // u1 = 0.1, u2 = 0.18, u3 = 0.244 > 0.2 -> spike, X = 1 -> 0.5 g.
        let mut g = Genome::zeros(0);
        g.w_in[0][0] = 1.0;
        let mut s = NetworkState::new(&g);
        let out: Vec<f64> = (0..3).map(|_| forward(&g, &mut s, 0.5, 0.0).unwrap()).collect();
        assert_eq!(out[0], -0.8);
        assert_eq!(out[1], -0.8);
        assert_eq!(out[2], 0.5);
        assert_eq!(s.spike_counts, vec![1]);
        assert_eq!(s.neurons[0].u, 0.0);
    }

    #[test]
    fn forward_rejects_mismatched_state() {
        let g = Genome::zeros(3);
        let mut s = NetworkState::new(&Genome::zeros(2));
        assert!(matches!(forward(&g, &mut s, 0.1, 0.0), Err(Error::Config(_))));
    }

    #[test]
    fn reset_matches_fresh_state() {
        let mut g = Genome::uniform(4, 0.9);
        g.hidden_params[2].theta_init = 0.7;
        let mut s = NetworkState::new(&g);
        for k in 0..50 {
            forward(&g, &mut s, 1.0 + k as f64 * 0.1, 0.3).unwrap();
        }
        assert!(s.total_spikes() > 0);
        s.reset();
        assert_eq!(s, NetworkState::new(&g));
        assert_eq!(s.neurons[2].theta, 0.7);
        assert_eq!(s.total_spikes(), 0);

        let mut fresh = NetworkState::new(&g);
        for k in 0..50 {
            let d = k as f64 * 0.2;
            assert_eq!(forward(&g, &mut s, d, 1.0).unwrap(), forward(&g, &mut fresh, d, 1.0).unwrap());
        }
    }

    fn arb_params() -> impl Strategy<Value = NeuronParams> {
        (0.0..=2.0, 0.0..=1.0, 0.0..=2.0, 0.0..=1.0, 0.0..=1.0).prop_map(|(a, t, at, tt, th)| NeuronParams {
            alpha_u: a,
            tau_u: t,
            alpha_theta: at,
            tau_theta: tt,
            theta_init: th,
        })
    }

    fn arb_genome() -> impl Strategy<Value = Genome> {
        (0usize..=6).prop_flat_map(|n| {
            let cols = n.max(1);
            (
                prop::collection::vec(prop::collection::vec(-3.0..3.0f64, cols), 4),
                prop::collection::vec(-3.0..3.0f64, n),
                prop::collection::vec(arb_params(), n),
                arb_params(),
                (0.0..=2.0f64, 0.0..0.99f64),
            )
                .prop_map(move |(w_in, w_out, hidden_params, output_params, (ax, tx))| Genome {
                    n_hidden: n,
                    w_in,
                    w_out,
                    hidden_params,
                    output_params,
                    decoder: DecoderParams { alpha_x: ax, tau_x: tx, ..DecoderParams::INITIAL },
                })
        })
    }

    proptest! {
        #[test]
        fn encoding_is_exclusive(d in -1e6..1e6f64, dd in -1e6..1e6f64) {
            let c = encode(d, dd).unwrap();
            prop_assert_eq!(c[0] * c[1], 0.0);
            prop_assert_eq!(c[2] * c[3], 0.0);
            prop_assert!(c.iter().all(|&x| x >= 0.0));
        }

        #[test]
        fn membrane_decay_is_geometric(u0 in -5.0..5.0f64, tau in 0.0..=1.0f64, k in 0u32..40) {
            let p = NeuronParams { tau_u: tau, ..NeuronParams::INITIAL };
            let mut n = NeuronState { u: u0, theta: f64::INFINITY };
            let mut expected = u0;
            for _ in 0..k {
                lif_step(&mut n, &p, 0.0, false);
                expected *= tau;
            }
            prop_assert_eq!(n.u, expected);
        }

        #[test]
        fn adaptive_threshold_grows_iff_gain_exceeds_decay_loss(
            theta in 0.0..=1.0f64, tau in 0.0..=1.0f64, alpha in 0.0..=2.0f64,
        ) {
            let p = NeuronParams { alpha_u: 1.0, tau_u: 0.0, alpha_theta: alpha, tau_theta: tau, theta_init: theta };
            let mut n = NeuronState { u: 0.0, theta };
            prop_assert!(lif_step(&mut n, &p, theta + 1.0, true));
            let grows = alpha > theta * (1.0 - tau);
            let margin = (alpha - theta * (1.0 - tau)).abs();
            prop_assume!(margin > 1e-12);
            prop_assert_eq!(n.theta > theta, grows);
        }

        #[test]
        fn trace_and_action_stay_bounded(ax in 0.0..=2.0f64, tx in 0.0..0.999f64, n in 1usize..300) {
            let dec = DecoderParams { alpha_x: ax, tau_x: tx, ..DecoderParams::INITIAL };
            let bound = ax / (1.0 - tx);
            let mut x = 0.0;
            for _ in 0..n {
                let a = decode(&mut x, &dec, true);
                prop_assert!(x <= bound * (1.0 + 1e-12));
                prop_assert!((dec.r1..=dec.r2).contains(&a));
            }
        }

        #[test]
        fn interleaved_replicas_never_diverge(
            g in arb_genome(),
            obs in prop::collection::vec((-10.0..10.0f64, -40.0..40.0f64), 1..120),
        ) {
            let mut a = NetworkState::new(&g);
            let mut b = NetworkState::new(&g);
            for &(d, dd) in &obs {
                let ta = forward(&g, &mut a, d, dd).unwrap();
                let tb = forward(&g, &mut b, d, dd).unwrap();
                prop_assert_eq!(ta.to_bits(), tb.to_bits());
                prop_assert!((g.decoder.r1..=g.decoder.r2).contains(&ta));
            }
            prop_assert_eq!(&a, &b);
            let mut prev = vec![0u64; a.len()];
            let mut c = NetworkState::new(&g);
            for &(d, dd) in &obs {
                forward(&g, &mut c, d, dd).unwrap();
                prop_assert!(c.spike_counts.iter().zip(&prev).all(|(now, before)| now >= before));
                prop_assert!(c.x_out >= 0.0);
                prop_assert!(c.neurons.iter().all(|n| n.theta >= 0.0));
                prev.clone_from(&c.spike_counts);
            }
        }

        #[test]
        fn silent_network_outputs_r1(g in arb_genome(), n in 1usize..50) {
            let mut g = g;
            g.w_in.iter_mut().flatten().for_each(|w| *w = 0.0);
            let mut s = NetworkState::new(&g);
            for _ in 0..n {
                let out = forward(&g, &mut s, 3.0, -2.0).unwrap();
                prop_assert_eq!(out, g.decoder.r1);
            }
            prop_assert_eq!(s.total_spikes(), 0);
        }
    }
}
