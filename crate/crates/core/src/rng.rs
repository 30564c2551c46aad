//! Seeded, named random substreams.
//!
//! A stream is identified by `(seed, name, index)`; adding a new consumer with
//! a new name never perturbs existing streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const BASELINE: &str = "baseline";
pub const ACCURACY: &str = "accuracy";
pub const MONTE_CARLO: &str = "monte-carlo";
pub const INSTANCES: &str = "instances";
pub const KMEANS: &str = "kmeans";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Deterministic RNG for stream `name`, shard `index`.
pub fn substream(seed: u64, name: &str, index: u64) -> StreamRng {
    let mixed = splitmix64(splitmix64(seed ^ fnv1a(name)) ^ splitmix64(index.wrapping_add(1)));
    ChaCha8Rng::seed_from_u64(mixed)
}
