//! Seeded, splittable random streams.
//!
//! Every sampler takes an explicit RNG. Parallel workers derive disjoint
//! streams from one run seed with [`stream`].

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

/// Generator for `(seed, stream)`. Distinct stream ids never overlap.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
