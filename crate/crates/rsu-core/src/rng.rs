//! Deterministic seed derivation.
//!
//! Every stochastic component in the crate draws from a [`ChaCha8Rng`] whose
//! seed is derived from a master seed plus a domain tag and a few indices.
//! Results are therefore bit-identical across runs, platforms and worker
//! counts: a value never depends on which thread computed it.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep unrelated streams apart even when their indices collide.
pub mod domain {
    pub const SYNTH: u64 = 0x01;
    pub const SHADOW: u64 = 0x02;
    pub const OFFLOAD_INIT: u64 = 0x03;
    pub const EVOLVER_INIT: u64 = 0x04;
    pub const VARIATION: u64 = 0x05;
    pub const EVAL: u64 = 0x06;
    pub const OFFLOAD_RANDOM: u64 = 0x07;
}

/// Mixes an arbitrary sequence of words into one seed (splitmix64 chain).
pub fn mix(parts: &[u64]) -> u64 {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        state = state.wrapping_add(p).wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        state = z ^ (z >> 31);
    }
    state
}

/// A generator for the stream identified by `parts`.
pub fn stream(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(parts))
}
