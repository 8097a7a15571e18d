//! Seeded random streams. Every consumer of randomness gets its own ChaCha
//! stream so that results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used for the degree sequence of a run.
pub const SEQUENCE_STREAM: u64 = u64::MAX;
/// Stream used for the order-dependent choices of a run (initial infective, pairings).
pub const EVENT_STREAM: u64 = 0;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-vertex (or per-particle) stream; never collides with the two reserved ones.
pub fn vertex_rng(seed: u64, vertex: u64) -> ChaCha8Rng {
    stream_rng(seed, vertex + 1)
}

/// SplitMix64 of `(base, index)`: well-separated seeds for retries of one replicate.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
