//! Reproducible random streams.
//!
//! Every source of randomness in the crate is a [`RandomStream`]: a ChaCha8
//! generator keyed by a 64-bit seed and a 64-bit stream index. The same
//! `(seed, stream_index)` pair reproduces the identical draw sequence
//! bit-for-bit, and distinct stream indices give statistically independent
//! streams, which is what makes the parallel harness thread-count invariant.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A counter-tracked uniform random stream.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_index: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    /// Create the stream for `(seed, stream_index)`.
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self { seed, stream_index, counter: 0, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Number of uniform draws taken so far.
    pub fn draws(&self) -> u64 {
        self.counter
    }

    /// Next uniform draw in the half-open interval [0, 1).
    pub fn next_unit(&mut self) -> f64 {
        self.counter += 1;
        // 53 random mantissa bits, the standard u64 -> f64 construction.
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Next uniform draw in the open interval (0, 1).
    ///
    /// Rejects the single lattice point 0 (probability 2^-53 per draw), so
    /// splitting fractions are always valid.
    pub fn next_open01(&mut self) -> f64 {
        loop {
            let u = self.next_unit();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Bernoulli draw with success probability `p`.
    pub fn next_bernoulli(&mut self, p: f64) -> bool {
        self.next_unit() < p
    }
}
