//! Seed derivation and counter-based random streams.
//!
//! Every random stream in the crate is keyed by a master seed plus a path of
//! integer tags (experiment id, grid index, replicate index, ...). Streams are
//! derived by hashing, never by advancing a shared generator, so results do not
//! depend on evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for all sampling.
pub type StreamRng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `seed` and a path of tags.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t.wrapping_add(0x632B_E59B_D9B4_E019))))
}

pub fn stream(seed: u64, tags: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}

/// Counter-based uniform draw in [0, 1): the `index`-th value of the stream
/// keyed by `key`. Uses the top 53 bits.
#[inline]
pub fn counter_uniform(key: u64, index: u64) -> f64 {
    let bits = splitmix64(key ^ splitmix64(index));
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
