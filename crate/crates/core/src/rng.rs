//! Seeded random streams.
//!
//! Every generator in the crate draws from [`Xoshiro256PlusPlus`] seeded with
//! [`SeedableRng::seed_from_u64`], which expands the 64-bit seed through
//! SplitMix64. Uniform `f64` draws take the top 53 bits of `next_u64` scaled by
//! 2^-53, so they land in `[0, 1)`.

use rand::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus;

/// Build the canonical stream for `seed`.
pub fn stream(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Independent substream `index` of `seed`, used for per-class or per-repeat
/// draws that must not depend on how many values other substreams consumed.
pub fn substream(seed: u64, index: u64) -> Xoshiro256PlusPlus {
    let mut rng = stream(seed);
    for _ in 0..index {
        rng.jump();
    }
    rng
}
