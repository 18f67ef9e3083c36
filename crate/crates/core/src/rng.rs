//! Seeded random streams with counter-based splitting.
//!
//! A stream is identified by `(master_seed, stream_index)`. The same pair
//! always yields the same sequence, independent of how many other streams
//! exist or in which order they are consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub master_seed: u64,
    pub stream: u64,
}

impl StreamId {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        Self { master_seed, stream }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Shorthand for `StreamId::new(master_seed, stream).rng()`.
pub fn split_stream(master_seed: u64, stream: u64) -> ChaCha20Rng {
    StreamId::new(master_seed, stream).rng()
}
