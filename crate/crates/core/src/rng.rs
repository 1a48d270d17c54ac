//! Counter-based pseudo-random draws.
//!
//! A draw is a pure function of `(seed, counter)`: the counter is spread by a
//! Weyl increment, combined with the pre-mixed seed and passed through the
//! SplitMix64 finalizer. Any index of a stream can be computed without
//! generating its predecessors, and chunks of a stream can be produced on
//! different threads with bit-identical results.
//!
//! Not suitable for cryptographic use.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A keyed counter-based generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { key: mix64(seed ^ 0x6A09_E667_F3BC_C908) }
    }

    /// An independent generator for a sub-stream.
    pub fn split(&self, stream: u64) -> Self {
        CounterRng { key: mix64(self.key ^ mix64(stream.wrapping_add(GOLDEN_GAMMA))) }
    }

    #[inline]
    pub fn u64_at(&self, counter: u64) -> u64 {
        mix64(self.key.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn f64_at(&self, counter: u64) -> f64 {
        (self.u64_at(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Index of the first cumulative weight exceeding `u`.
///
/// Falls back to the last index when rounding leaves the cumulative sum
/// slightly below 1.
pub(crate) fn pick(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}
