//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream keyed by
//! a 64-bit seed and a stream tag. Replication seeds are derived from a master
//! seed and a path of indices with a SplitMix64 mixer, so a replication's draws
//! depend only on `(master seed, indices, tag)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags separating independent uses of the same seed.
pub mod tag {
    pub const REGRESSION: u64 = 0x7265_6772;
    pub const PVALUES: u64 = 0x7076_616c;
    pub const CRITVAL_POINT: u64 = 0x6376_7074;
    pub const CRITVAL_RD: u64 = 0x6376_7264;
    pub const CRITVAL_PI0: u64 = 0x6376_7069;
    pub const DESIGN_ONLY: u64 = 0x6465_7369;
    pub const LEMMA: u64 = 0x6c65_6d6d;
    pub const EXPERIMENT: u64 = 0x6578_7065;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and a path of indices.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &i| splitmix64(acc ^ splitmix64(i)))
}

/// The generator for `(seed, tag)`: key is the seed, ChaCha stream is the tag.
pub fn stream_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}
