//! Seed derivation for the simulator's independent random streams.
//!
//! Every source of randomness in an experiment is a [`ChaCha8Rng`] seeded by
//! mixing an explicit base seed with a stream salt and the indices that
//! identify the consumer (node id, round, epoch, ...). Streams are therefore
//! independent of scheduling: any client, sample or round can be generated in
//! isolation and in any order with identical results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream salts. Each distinct random purpose gets its own constant so that
/// two streams never collide even when their numeric indices do.
pub mod salt {
    pub const NODE_SCHEDULE: u64 = 0x01;
    pub const NODE_GEN: u64 = 0x02;
    pub const SAMPLE: u64 = 0x03;
    pub const SPLIT: u64 = 0x04;
    pub const INIT: u64 = 0x05;
    pub const SHUFFLE: u64 = 0x06;
    pub const SAMPLING: u64 = 0x07;
    pub const KMEANS: u64 = 0x08;
    pub const FLEET: u64 = 0x09;
}

/// SplitMix64 finalizer; full-avalanche mixing of a single word.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a list of stream coordinates into one 64-bit seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut h = splitmix64(base);
    for &p in parts {
        h = splitmix64(h ^ p.wrapping_mul(0xff51_afd7_ed55_8ccd));
    }
    h
}

/// A ChaCha8 stream for the given base seed and coordinates.
pub fn stream(base: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, parts))
}

/// In-place Fisher–Yates shuffle with a caller-owned generator.
///
/// Implemented locally so the shuffle order is pinned by this crate rather
/// than by the `rand` crate's internals.
pub fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    use rand::Rng;
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
