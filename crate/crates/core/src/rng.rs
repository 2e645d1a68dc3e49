//! Seed discipline: one root seed per run, with independent child streams
//! for every randomised component.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Fixed stream indices for the components of a single run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    DesignEngine = 1,
    Landscape = 2,
    Application = 3,
    MetaLearner = 4,
    Folds = 5,
    Dataset = 6,
}

/// RNG for `stream` of the run rooted at `seed`.
pub fn child_rng(seed: u64, stream: Stream) -> Rng {
    indexed_rng(seed, stream as u64)
}

/// RNG for an arbitrary stream index under `seed`.
pub fn indexed_rng(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derive a child seed from `(seed, index)`; used for per-repeat and
/// per-timestep seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser over the combined input
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
