//! Deterministic, counter-style random streams.
//!
//! Every random draw in the crate comes from a ChaCha stream keyed by a
//! master seed plus a short tag path (class index, sample index, trial
//! number, ...). Streams for distinct tags are independent, so work can be
//! parallelized or reordered without changing any draw.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; used to mix tags into a stream key.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a seed with a tag path into a single 64-bit key.
pub fn mix(seed: u64, tags: &[u64]) -> u64 {
    let mut key = splitmix64(seed ^ 0x6a09_e667_f3bc_c908);
    for (i, &t) in tags.iter().enumerate() {
        key = splitmix64(key ^ splitmix64(t.wrapping_add(i as u64 + 1)));
    }
    key
}

/// Returns the random stream for `(seed, tags)`.
pub fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, tags))
}
