//! Deterministic RNG substreams.
//!
//! Every stochastic operation derives an independent ChaCha12 stream from
//! (master seed, stage tag, item index). Results are therefore identical
//! for a fixed seed no matter how work is scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stage tags keep substreams of different pipeline stages disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    BeamParticle = 1,
    TomoProjector = 2,
    TomoIteration = 3,
    PercolationTrial = 4,
    Generic = 5,
}

/// splitmix64 mixing step.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Collapse (seed, tag, index) into a single well-mixed 64-bit value.
pub fn mix(seed: u64, tag: Stream, index: u64) -> u64 {
    let mut state = seed;
    let a = splitmix64(&mut state);
    state = state.wrapping_add(tag as u64);
    let b = splitmix64(&mut state);
    state = state.wrapping_add(index);
    let c = splitmix64(&mut state);
    a ^ b.rotate_left(21) ^ c.rotate_left(42)
}

/// Independent RNG substream for item `index` of stage `tag`.
pub fn substream(seed: u64, tag: Stream, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(mix(seed, tag, index).into());
    rng
}
