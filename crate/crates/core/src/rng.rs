//! Reproducible random streams.
//!
//! Every Monte Carlo repetition draws from its own ChaCha8 stream, selected
//! by the repetition index under a common master seed. Streams are
//! independent of the order in which workers pick them up.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Generator for stream `stream` under `master_seed`.
pub fn stream_rng(master_seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Generator seeded directly from `seed` (stream 0).
pub fn seeded_rng(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
