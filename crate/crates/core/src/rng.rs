//! Seeded random streams.
//!
//! Every stochastic routine takes an explicit generator. Batch routines derive
//! one independent ChaCha stream per draw from a single seed, so results do not
//! depend on scheduling.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as SeededRng;

pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Stream `index` of the family rooted at `seed`. Stream 0 is reserved for
/// [`seeded`], so derived draws never alias a plain seeded generator.
pub fn derived_stream(seed: u64, index: u64) -> SeededRng {
    let mut rng = SeededRng::seed_from_u64(seed);
    rng.set_stream(index + 1);
    rng
}
