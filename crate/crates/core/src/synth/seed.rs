//! Random stream derivation.
//!
//! Every stream is a ChaCha8 generator seeded from a 64-bit value. Named
//! sub-streams hash a label (FNV-1a) into the parent seed and finish with
//! the SplitMix64 mixer, so a stream depends only on
//! `(base seed, trial, label)` and never on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the sub-stream `label` for `trial` under `base`.
pub fn derive_seed(base: u64, trial: u64, label: &str) -> u64 {
    splitmix64(splitmix64(base.wrapping_add(trial)) ^ fnv1a(label.as_bytes()))
}

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}
