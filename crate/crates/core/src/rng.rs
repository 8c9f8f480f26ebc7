//! Seeding contract shared by every randomized routine.
//!
//! All randomness flows through [`ChaCha8Rng`] seeded with
//! `seed_from_u64`. Independent trials derive their own seeds from a master
//! seed with [`trial_seed`], so results never depend on scheduling.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Identifier recorded in reports so that runs can be reproduced exactly.
pub const PRNG_ID: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64); trial seeds = splitmix64";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` under `master`: `splitmix64(master ^ splitmix64(index))`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
