//! Counter-based uniform draws.
//!
//! Draw `i` of stream `s` under key `seed` is a pure function of
//! `(seed, s, i)`: it is word `2i` of the ChaCha8 keystream with that key and
//! stream id. Replications that own distinct stream ids can therefore run in
//! any order, on any number of threads, and still produce the same numbers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        inner.set_word_pos(0);
        Self { inner }
    }

    /// Uniform on the open interval `(0, 1)`, at the given counter position.
    pub fn uniform_at(&mut self, index: u64) -> f64 {
        self.inner.set_word_pos(2 * index as u128);
        to_open_unit(self.inner.next_u64())
    }

    /// The first `n` uniforms of the stream, in counter order.
    pub fn uniforms(&mut self, n: usize) -> Vec<f64> {
        self.inner.set_word_pos(0);
        (0..n).map(|_| to_open_unit(self.inner.next_u64())).collect()
    }
}

fn to_open_unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Derives an independent 64-bit key from a parent seed and a label.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
