//! SplitMix64, the only random source in the crate.
//!
//! Recurrence, all arithmetic modulo 2^64:
//!
//! ```text
//! state <- state + 0x9E3779B97F4A7C15
//! z     <- (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
//! z     <- (z ^ (z >> 27)) * 0x94D049BB133111EB
//! out   <- z ^ (z >> 31)
//! ```
//!
//! Uniforms take the top 53 bits of `out` divided by 2^53. Gaussians use the
//! Box-Muller transform on two consecutive uniforms, discarding the sine
//! branch, so every normal draw consumes exactly two outputs. The whole
//! generator is a few lines in any language, which keeps synthetic corpora
//! reproducible outside Rust.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Seeds the generator.
    pub const fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        finalize(self.state)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal draw.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        crate::num::sqrt(-2.0 * crate::num::ln(u1)) * crate::num::cos(core::f64::consts::TAU * u2)
    }

    /// Uniform index in `0..n` (`n > 0`).
    pub fn below(&mut self, n: usize) -> usize {
        // multiply-shift; bias is below 2^-64 * n
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines two seeds into one, order-sensitive.
pub fn mix_seeds(a: u64, b: u64) -> u64 {
    finalize(a.wrapping_mul(GOLDEN) ^ finalize(b.wrapping_add(GOLDEN)))
}

/// 64-bit FNV-1a hash of a string, used to derive per-product seeds.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
