//! Counter-based pseudo-random numbers.
//!
//! Every draw is a pure function of `(seed, stream, counter)`, so parallel
//! consumers never share mutable state and a run is reproducible for a fixed
//! seed no matter how work is scheduled across threads.

/// SplitMix64 finalizer. Full-avalanche 64-bit mix.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed counter generator.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed }
    }

    /// Raw 64-bit output for `(stream, counter)`.
    #[inline]
    pub fn bits(&self, stream: u64, counter: u64) -> u64 {
        // Distinct odd multipliers keep the two indices from aliasing.
        let k = self
            .seed
            .wrapping_add(stream.wrapping_mul(0xa076_1d64_78bd_642f))
            .wrapping_add(counter.wrapping_mul(0xe703_7ed1_a0b4_28db));
        mix64(mix64(k) ^ stream.rotate_left(17) ^ counter)
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&self, stream: u64, counter: u64) -> f64 {
        (self.bits(stream, counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A standard normal draw via Box-Muller; uses counters `2c` and `2c+1`.
    pub fn normal(&self, stream: u64, counter: u64) -> f64 {
        let u1 = (self.bits(stream, 2 * counter) >> 11) as f64 + 0.5;
        let u1 = u1 * (1.0 / (1u64 << 53) as f64); // in (0,1)
        let u2 = self.uniform(stream, 2 * counter + 1);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
