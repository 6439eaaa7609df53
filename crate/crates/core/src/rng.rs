//! Seed derivation and the random generator used throughout the crate.
//!
//! Every random draw is produced by ChaCha8 keyed with a 64-bit seed and a
//! stream index, so a `(seed, stream)` pair fully determines the draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator type used for all randomness.
pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a sequence of integers into a single seed.
///
/// Used to derive per-trial seeds from `(master_seed, grid_index, trial_index)`
/// so that results do not depend on scheduling order.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6A09_E667_F3BC_C909, |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}

/// Generator for `seed` on stream 0.
pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Generator for `seed` on the given stream.
pub fn rng_stream(seed: u64, stream: u64) -> Rng {
    let mut r = Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
