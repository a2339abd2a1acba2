//! Seeded random sources.
//!
//! All sampling goes through [`SimRng`], a ChaCha stream cipher with 8 rounds
//! as implemented by `rand_chacha`. Uniform draws are `f64` in `[0, 1)` and
//! discrete variables are sampled by inverse CDF over the canonical symbol
//! order, so a fixed seed reproduces the same bytes on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Identifier recorded in run manifests.
pub const PRNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64, inverse-CDF sampling";

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives an independent child seed from a master seed and a path of indices.
///
/// Used to give every trial, restart and method its own stream, so results do
/// not depend on execution order or thread count.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &i| {
        splitmix64(acc ^ splitmix64(i.wrapping_add(1)))
    })
}
