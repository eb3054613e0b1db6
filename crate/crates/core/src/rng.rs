//! Seeded random number generation.
//!
//! Every stochastic operation in the crate takes its generator from here so a
//! single `u64` seed reproduces a whole run bit for bit on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
