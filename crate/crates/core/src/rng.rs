//! Seeded random number generation.
//!
//! Every random choice in the crate is drawn from the splitmix64 sequence, so
//! any result is reproducible from the seed that produced it. The generator is
//! also normative for the wire-level contracts: the interleaver permutation and
//! the harness sub-seed derivation are defined in terms of this exact output
//! stream, so golden files stay valid across implementations.
//!
//! Independent streams are derived by mixing a parent seed with a role tag
//! (and an index where a family of streams is needed) through [`mix`], the
//! stateless splitmix64 output function.

use crate::math;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 generator.
///
/// Reference output function: the state advances by the golden-gamma constant
/// and each output is the mixed state (Steele, Lea, Flood's published
/// finalizer).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / ((1u64 << 53) as f64))
    }

    /// Fair coin.
    #[inline]
    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Uniform bit as 0/1.
    #[inline]
    pub fn next_bit(&mut self) -> u8 {
        (self.next_u64() & 1) as u8
    }

    /// Pair of independent standard normal variates (Box–Muller).
    ///
    /// A pair per call keeps the draw count aligned with complex noise
    /// samples: one call, one complex Gaussian.
    #[inline]
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        // u1 in (0, 1] so the log is finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / ((1u64 << 53) as f64));
        let u2 = self.next_f64();
        let r = math::sqrt(-2.0 * math::ln(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        (r * math::cos(theta), r * math::sin(theta))
    }

    /// Single standard normal variate (discards the pair's second half).
    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        self.next_gaussian_pair().0
    }
}

/// Stateless splitmix64 output for seed `x`: the first value of
/// `SplitMix64::new(x)`.
///
/// This is the normative sub-seed derivation: a child seed for index `i`
/// under master seed `m` is `mix(m ^ i)`.
#[inline]
pub fn mix(x: u64) -> u64 {
    SplitMix64::new(x).next_u64()
}

/// Role tags for deriving independent streams from one master seed.
///
/// Tags are arbitrary fixed 64-bit constants; they only need to be distinct.
pub mod tags {
    /// Alice's coherent-state quadrature draws.
    pub const STATES: u64 = 0x5354_4154_4553_0001;
    /// Bob's measurement basis choices.
    pub const BASES: u64 = 0x4241_5345_5300_0002;
    /// Quadrature channel noise in the Gaussian phase.
    pub const MEASURE_NOISE: u64 = 0x4d4e_4f49_5345_0003;
    /// Disclosed-subset selection for parameter estimation.
    pub const DISCLOSE: u64 = 0x4449_5343_4c00_0004;
    /// Per-frame raw key bits (add the frame index).
    pub const KEY: u64 = 0x4b45_5942_4954_0100;
    /// Per-frame symbol channel noise (add the frame index).
    pub const FRAME_NOISE: u64 = 0x4652_4e4f_4953_0200;
    /// Uncoded-baseline bit draws.
    pub const BASELINE: u64 = 0x4241_5345_4c49_0005;
    /// Channel phase-disturbance draws.
    pub const PHASE: u64 = 0x5048_4153_4500_0006;
    /// Uncoded-baseline channel noise.
    pub const BASELINE_NOISE: u64 = 0x424e_4f49_5345_0007;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix64_reference_vector() {
        // First outputs for seed 0, cross-checked against the published
        // reference implementation.
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(g.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(g.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn mix_is_first_output() {
        assert_eq!(mix(42), SplitMix64::new(42).next_u64());
        assert_ne!(mix(42), mix(43));
    }

    #[test]
    fn uniform_range() {
        let mut g = SplitMix64::new(7);
        for _ in 0..10_000 {
            let u = g.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut g = SplitMix64::new(123);
        let n = 200_000;
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..n {
            let (a, b) = g.next_gaussian_pair();
            sum += a + b;
            sumsq += a * a + b * b;
        }
        let samples = (2 * n) as f64;
        let mean = sum / samples;
        let var = sumsq / samples - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn deterministic_streams() {
        let mut a = SplitMix64::new(99);
        let mut b = SplitMix64::new(99);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
