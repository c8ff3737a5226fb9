//! Seed plumbing. Every random draw in the crate comes from a ChaCha stream
//! seeded through [`derive_seed`], so results never depend on global state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a seed and a path of integer labels.
///
/// The value is fixed across platforms and releases: sweeps depend on it for
/// byte-identical reruns.
pub fn derive_seed(base: u64, labels: &[u64]) -> u64 {
    let mut h = mix64(base ^ GOLDEN);
    for (i, &l) in labels.iter().enumerate() {
        h = mix64(h.wrapping_add(GOLDEN.wrapping_mul(i as u64 + 1)) ^ mix64(l));
    }
    h
}

/// Hashes a byte string into a label for [`derive_seed`] (FNV-1a folded
/// through [`mix64`]).
pub fn label(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix64(h)
}

pub fn rng_from(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Domain separators for sub-streams derived from one trial seed.
pub mod stream {
    pub const SCENE: u64 = 1;
    pub const OBSERVE: u64 = 2;
    pub const CHANNEL: u64 = 3;
    pub const OUTAGE: u64 = 4;
    pub const CORRUPT: u64 = 5;
    pub const CODEBOOK: u64 = 6;
}
