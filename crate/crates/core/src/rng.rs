//! Seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded through
//! [`rng_from_seed`]. Child streams are derived from a parent seed and a
//! stream index with [`derive_seed`]:
//!
//! ```text
//! splitmix64(x):
//!     z = x + 0x9E3779B97F4A7C15            (wrapping)
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     return z ^ (z >> 31)
//!
//! derive_seed(base, index) = splitmix64(base ^ splitmix64(index))
//! ```
//!
//! Batches use `derive_seed(base_seed, trial)` as the trial seed, and within a
//! trial stream 0 draws the planted truth, stream 1 the weights and stream 2
//! the relabeling used for labeled success. The mapping is fixed so runs are
//! reproducible across machines and thread counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub const STREAM_TRUTH: u64 = 0;
pub const STREAM_WEIGHTS: u64 = 1;
pub const STREAM_RELABEL: u64 = 2;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
