//! Seeded, splittable random streams.
//!
//! Every Monte-Carlo loop in the crate draws from an [`RngStream`], identified
//! by a `(seed, stream_id)` pair. Workers that fan out get their own stream id,
//! so the union of draws does not depend on scheduling.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

/// Generator type handed out by [`RngStream::rng`].
pub type StreamRng = Xoshiro256PlusPlus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub const fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut s = self.seed;
        let a = splitmix64(&mut s);
        let mut t = self.stream_id ^ 0xD1B5_4A32_D192_ED03;
        let b = splitmix64(&mut t);
        let mut state = a ^ b.rotate_left(17);
        let mut bytes = [0u8; 32];
        for chunk in bytes.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Xoshiro256PlusPlus::from_seed(bytes)
    }

    /// Independent child stream, e.g. one per worker, trial or minibatch.
    pub fn child(&self, id: u64) -> RngStream {
        let mut s = self.seed ^ self.stream_id.wrapping_mul(0xA24B_AED4_963E_E407);
        RngStream::new(splitmix64(&mut s), id)
    }
}
