//! Spiking network substrate: input encoding, (adaptive) LIF dynamics,
//! spike-trace decoding and the feed-forward pass from a divergence
//! observation to a thrust setpoint.

mod genome;
mod network;
mod params;

pub use genome::{Genome, INPUTS, MAX_HIDDEN};
pub use network::{decode, encode, forward, lif_step, InputCurrents, NetworkState, NeuronState};
pub use params::{DecoderParams, NeuronParams, THRUST_MAX_G, THRUST_MIN_G};
