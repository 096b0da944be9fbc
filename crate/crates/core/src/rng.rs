//! The single pseudo-random generator used across the crate.
//!
//! Every random operation takes an explicit `u64` seed and expands it with
//! [`ChaCha8Rng::seed_from_u64`]. ChaCha8 output is specified independently
//! of platform and word size, so a given seed reproduces the same stream
//! everywhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
