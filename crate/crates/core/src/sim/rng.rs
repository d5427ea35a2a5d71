//! Seeded, stream-separated randomness.
//!
//! Every stochastic model instance owns one [`RngStream`]. Streams are ChaCha8
//! generators keyed by the scenario seed, with the ChaCha stream word set from a
//! 64-bit FNV-1a hash of the stream label. ChaCha output is specified
//! bit-for-bit, so draw sequences are identical on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    label: String,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, label: impl Into<String>) -> Self {
        let label = label.into();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(fnv1a64(label.as_bytes()));
        Self { seed, label, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Next value in [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on [lo, hi). Returns `lo` when the range is empty. Consumes one draw.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.uniform();
        if hi <= lo {
            lo
        } else {
            lo + (hi - lo) * u
        }
    }

    /// Uniform integer in [lo, hi] inclusive. Consumes one draw.
    pub fn uniform_int(&mut self, lo: u32, hi: u32) -> u32 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        let k = (self.uniform() * span as f64) as u64;
        lo + k.min(span - 1) as u32
    }
}

/// Derives the seed for replication `rep` of a sweep.
pub fn derive_seed(base: u64, rep: u32) -> u64 {
    base.wrapping_add(rep as u64)
}

pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
