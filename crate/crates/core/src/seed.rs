//! Counter-based seed derivation.
//!
//! Child seeds are pure functions of `(parent, index)`, so a task's random
//! stream depends only on its position in the experiment grid and never on
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for child `index` of `parent`.
pub fn derive(parent: u64, index: u64) -> u64 {
    mix(parent ^ mix(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Seed for a path of indices below `root`.
pub fn derive_path(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(root, |s, &i| derive(s, i))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
