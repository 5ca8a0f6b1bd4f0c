//! Deterministic derivation of independent random streams.
//!
//! Every stochastic consumer (an episode, a mutation, an environment draw)
//! gets its own generator seeded from the master seed plus a tuple of tags.
//! The derivation is order-independent with respect to thread scheduling, so
//! serial and parallel runs draw identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream tags. Distinct tags keep unrelated consumers from sharing streams.
pub mod tag {
    pub const INIT: u64 = 0x1001;
    pub const ENV_PARAMS: u64 = 0x1002;
    pub const EPISODE: u64 = 0x1003;
    pub const MUTATION: u64 = 0x1004;
    pub const SELECTION: u64 = 0x1005;
    pub const ROBUSTNESS: u64 = 0x2001;
    pub const TRANSIENT: u64 = 0x2002;
    pub const ACTIVITY: u64 = 0x2003;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a sequence of tags into a 64-bit stream seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn stream(master: u64, tags: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, tags))
}
