//! Seeded, splittable randomness. A master seed plus a stream index
//! deterministically derives an independent ChaCha stream, so campaigns
//! can parallelize over trials while staying bit-reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Derives the RNG for a given stream of a master seed. Streams with
/// distinct indices are independent; identical `(seed, stream)` pairs
/// reproduce byte-identical draws.
pub fn stream(master_seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// The default stream of a master seed.
pub fn master(master_seed: u64) -> ChaCha12Rng {
    stream(master_seed, 0)
}
