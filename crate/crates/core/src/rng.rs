//! Seed derivation.
//!
//! Every stochastic operation takes the run seed and derives its own
//! sub-seed from a `(tag, index)` pair, so components can be re-run in
//! isolation and concurrent workers stay independent of scheduling.
//! The scheme is: fold the tag bytes and the index into the seed with
//! wrapping multiply-xor steps, then finalize with SplitMix64.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed from the run seed, a component tag and an index.
pub fn derive(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h = seed ^ 0xa076_1d64_78bd_642f;
    for &b in tag.as_bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3);
    }
    h = (h ^ index).wrapping_mul(0x100_0000_01b3);
    splitmix64(h)
}

/// Seeded generator used throughout the crate.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for a derived sub-seed.
pub fn sub_rng(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    rng_from(derive(seed, tag, index))
}
