//! Per-trial random streams derived from a master seed and a trial counter.
//!
//! Each trial owns a ChaCha stream keyed by `mix(master_seed, trial_index)`,
//! so trials are independent of scheduling: the same configuration produces
//! bitwise-identical results whether trials run sequentially or on any
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; a full-avalanche mix of the counter into the seed.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The 64-bit stream key for a trial.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(trial_index.wrapping_add(1)))
}

/// The trial's random stream.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master_seed, trial_index))
}
