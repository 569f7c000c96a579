//! Deterministic pseudo-random source used for fold shuffling and synthetic
//! data generation.
//!
//! Reproducibility across implementations matters more here than statistical
//! sophistication, so the generator is pinned rather than delegated to an
//! external crate whose streams may change between versions. The algorithm is
//! xorshift64* (shift triple 12/25/27, multiplier `0x2545F4914F6CDD1D`); every
//! derived draw (index, unit interval, shuffle) is defined in FORMATS.md so the
//! exact byte streams can be recreated independently.

/// State substituted when a caller seeds with 0 (xorshift state must be
/// non-zero). The constant is the 64-bit golden-ratio increment.
const ZERO_SEED_SUBSTITUTE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        XorShift64Star {
            state: if seed == 0 { ZERO_SEED_SUBSTITUTE } else { seed },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut s = self.state;
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        self.state = s;
        s.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform index in `0..n` via modulo reduction. The modulo bias is below
    /// 2^-57 for any domain this crate draws from, and the simple rule keeps
    /// the stream trivial to reimplement.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0, "next_index requires a non-empty range");
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform f64 in [0, 1) from the top 53 bits of one draw.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// In-place Fisher-Yates shuffle: for i = n-1 down to 1, swap element i
    /// with element `next_index(i + 1)`.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_index(i + 1);
            items.swap(i, j);
        }
    }
}
