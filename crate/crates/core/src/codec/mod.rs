//! Serial turbo codec over differential 8-PSK.
//!
//! The transmit chain maps a frame of `k` raw key bits through four stages:
//!
//! 1. [`encode_outer`] - single-parity-check extension of each bit pair,
//!    producing the outer codeword `V` of length `3k/2`;
//! 2. [`interleave`] - a seeded bit permutation, producing `V'`;
//! 3. [`map_psk`] - Gray-labelled 8-PSK, producing `k/2` unit symbols `W`;
//! 4. [`diff_modulate`] - the recursive inner stage `X[i] = W[i-1]·X[i-1]`,
//!    producing `k/2 + 1` transmitted symbols anchored on a known reference.
//!
//! The receive chain ([`reconcile`]) iterates a forward-backward symbol
//! demodulator ([`demod_app`]) against the outer soft-in/soft-out decoder
//! ([`decode_outer_siso`]) through the interleaver, exchanging extrinsic
//! log-likelihood ratios until every parity check holds or the iteration
//! budget runs out.
//!
//! # Example
//!
//! ```
//! use cvqkd_core::codec::{encode_frame, reconcile, ChannelEstimate, CodecConfig, KeyBits, PhaseAssist};
//! use cvqkd_core::rng::SplitMix64;
//!
//! let cfg = CodecConfig::new(64, 7);
//! let key = KeyBits::random(cfg.k, &mut SplitMix64::new(1)).unwrap();
//! let frame = encode_frame(&key, &cfg).unwrap();
//!
//! // Noise-free round trip: one iteration recovers the key exactly.
//! let est = ChannelEstimate { noise_variance: 1e-4, phase: PhaseAssist::Flat };
//! let out = reconcile(&frame.diff_symbols, &cfg, &est).unwrap();
//! assert_eq!(out.key, key);
//! assert!(out.converged);
//! ```

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use alloc::vec::Vec;

mod demod;
mod differential;
mod interleaver;
mod outer;
mod phase;
mod psk;
mod reconcile;

pub use demod::demod_app;
pub use differential::diff_modulate;
pub use interleaver::{deinterleave, interleave, Permutation};
pub use outer::{decode_outer_siso, encode_outer, extract_info_bits, unsatisfied_checks};
pub use phase::{estimate_phase_track, DEFAULT_LOOP_BANDWIDTH};
pub use psk::{constellation_point, map_psk, step_bits, step_index, PSK_ORDER};
pub use reconcile::{reconcile, ChannelEstimate, PhaseAssist, ReconcileOutcome};

/// Complex sample type used throughout the codec.
pub type C64 = Complex<f64>;

/// Soft values are clamped to this magnitude before they cross a stage
/// boundary; keeps box-plus and exponentials finite without disturbing
/// decisions (a 30-LLR bit is wrong with probability under 1e-13).
pub const LLR_CLAMP: f64 = 30.0;

// ---------------------------------------------------------------------------
// Frame-level types
// ---------------------------------------------------------------------------

/// A raw or reconciled key: a bit sequence of even length.
///
/// Evenness is structural - the outer code consumes bits in pairs - so it is
/// enforced at construction rather than rechecked by every stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyBits {
    bits: Vec<u8>,
}

impl KeyBits {
    /// Wraps a bit sequence. Rejects odd lengths, empty input, and values
    /// outside {0, 1}.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.len() % 2 != 0 {
            return Err(Error::InvalidArgument("key length must be even and nonzero"));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("key bits must be 0 or 1"));
        }
        Ok(Self { bits })
    }

    /// Draws `k` uniform bits from `rng`.
    pub fn random(k: usize, rng: &mut SplitMix64) -> Result<Self> {
        if k == 0 || k % 2 != 0 {
            return Err(Error::InvalidArgument("key length must be even and nonzero"));
        }
        Ok(Self {
            bits: (0..k).map(|_| rng.next_bit()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Fraction of positions at which the two keys differ.
    pub fn error_fraction(&self, other: &KeyBits) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                what: "key comparison",
                expected: self.len(),
                got: other.len(),
            });
        }
        let errs = self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count();
        Ok(errs as f64 / self.len() as f64)
    }
}

/// Static parameters of the codec chain.
#[derive(Debug, Clone)]
pub struct CodecConfig {
    /// Frame size in information bits; even, at least 2.
    pub k: usize,
    /// Seed of the bit interleaver between outer code and modulator.
    pub interleaver_seed: u64,
    /// Constellation order; fixed at 8 (three coded bits per symbol).
    pub psk_order: usize,
    /// Demodulator/decoder exchange budget per frame.
    pub max_iterations: usize,
    /// Stop as soon as every outer parity check is satisfied.
    pub early_stop: bool,
    /// Known first transmitted symbol; unit modulus.
    pub reference_symbol: C64,
}

impl CodecConfig {
    /// Config with the given frame size and interleaver seed, defaults
    /// elsewhere (10 iterations, early stop, reference `1+0i`).
    pub fn new(k: usize, interleaver_seed: u64) -> Self {
        Self {
            k,
            interleaver_seed,
            psk_order: PSK_ORDER,
            max_iterations: 10,
            early_stop: true,
            reference_symbol: C64::new(1.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.k % 2 != 0 {
            return Err(Error::InvalidArgument("frame size k must be even and >= 2"));
        }
        if self.psk_order != PSK_ORDER {
            return Err(Error::InvalidArgument("constellation order must be 8"));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidArgument("max_iterations must be >= 1"));
        }
        let r2 = self.reference_symbol.norm_sqr();
        if !(r2 - 1.0).abs().is_finite() || (r2 - 1.0).abs() > 2e-9 {
            return Err(Error::InvalidArgument("reference symbol must have unit modulus"));
        }
        Ok(())
    }

    /// Outer codeword length `M = 3k/2`.
    pub fn outer_len(&self) -> usize {
        3 * self.k / 2
    }

    /// Modulated symbol count `S = k/2`.
    pub fn symbol_count(&self) -> usize {
        self.k / 2
    }

    /// Transmitted frame length `R = S + 1` (reference plus data symbols).
    pub fn transmit_len(&self) -> usize {
        self.symbol_count() + 1
    }
}

/// The staged products of one encoded frame.
#[derive(Debug, Clone)]
pub struct CodedFrame {
    /// Outer codeword `V`, length `3k/2`.
    pub outer_codeword: Vec<u8>,
    /// Interleaved codeword `V'`, length `3k/2`.
    pub interleaved: Vec<u8>,
    /// 8-PSK symbols `W`, length `k/2`.
    pub psk_symbols: Vec<C64>,
    /// Differentially modulated symbols `X`, length `k/2 + 1`.
    pub diff_symbols: Vec<C64>,
}

impl CodedFrame {
    /// Asserts the structural frame invariants against `cfg`: stage lengths,
    /// unit symbol moduli, and the differential recursion.
    pub fn check(&self, cfg: &CodecConfig) -> Result<()> {
        let m = cfg.outer_len();
        let s = cfg.symbol_count();
        if self.outer_codeword.len() != m {
            return Err(Error::LengthMismatch {
                what: "outer codeword",
                expected: m,
                got: self.outer_codeword.len(),
            });
        }
        if self.interleaved.len() != m {
            return Err(Error::LengthMismatch {
                what: "interleaved codeword",
                expected: m,
                got: self.interleaved.len(),
            });
        }
        if self.psk_symbols.len() != s {
            return Err(Error::LengthMismatch {
                what: "psk symbols",
                expected: s,
                got: self.psk_symbols.len(),
            });
        }
        if self.diff_symbols.len() != s + 1 {
            return Err(Error::LengthMismatch {
                what: "transmitted symbols",
                expected: s + 1,
                got: self.diff_symbols.len(),
            });
        }
        for z in self.psk_symbols.iter().chain(&self.diff_symbols) {
            if (z.norm_sqr() - 1.0).abs() > 2e-12 {
                return Err(Error::InvalidArgument("frame symbol off the unit circle"));
            }
        }
        let d0 = self.diff_symbols[0] - cfg.reference_symbol;
        if d0.norm_sqr() > 1e-24 {
            return Err(Error::InvalidArgument("frame does not start at the reference symbol"));
        }
        for i in 1..self.diff_symbols.len() {
            let step = self.diff_symbols[i] - self.psk_symbols[i - 1] * self.diff_symbols[i - 1];
            if step.norm_sqr() > 1e-24 {
                return Err(Error::InvalidArgument("differential recursion violated"));
            }
        }
        Ok(())
    }
}

/// Log-likelihood ratios exchanged between decoder stages.
///
/// Sign convention: positive means bit 0 is the more likely value.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftInfo {
    pub llrs: Vec<f64>,
}

impl SoftInfo {
    /// Uninformative prior: every bit equally likely.
    pub fn uniform(len: usize) -> Self {
        Self {
            llrs: alloc::vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.llrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llrs.is_empty()
    }

    /// Clamps every value to `[-LLR_CLAMP, LLR_CLAMP]`.
    pub fn clamp(&mut self) {
        for l in &mut self.llrs {
            *l = l.clamp(-LLR_CLAMP, LLR_CLAMP);
        }
    }
}

// ---------------------------------------------------------------------------
// Transmit chain
// ---------------------------------------------------------------------------

/// Runs the full encoder pipeline on one key frame.
pub fn encode_frame(key: &KeyBits, cfg: &CodecConfig) -> Result<CodedFrame> {
    cfg.validate()?;
    if key.len() != cfg.k {
        return Err(Error::LengthMismatch {
            what: "key frame",
            expected: cfg.k,
            got: key.len(),
        });
    }
    let outer_codeword = encode_outer(key);
    let interleaved = interleave(&outer_codeword, cfg.interleaver_seed)?;
    let psk_symbols = map_psk(&interleaved)?;
    let diff_symbols = diff_modulate(&psk_symbols, cfg.reference_symbol)?;
    let frame = CodedFrame {
        outer_codeword,
        interleaved,
        psk_symbols,
        diff_symbols,
    };
    frame.check(cfg)?;
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_bits_reject_bad_input() {
        assert!(KeyBits::new(alloc::vec![0, 1, 1]).is_err());
        assert!(KeyBits::new(alloc::vec![]).is_err());
        assert!(KeyBits::new(alloc::vec![0, 2]).is_err());
        assert!(KeyBits::new(alloc::vec![1, 0]).is_ok());
    }

    #[test]
    fn config_lengths() {
        let cfg = CodecConfig::new(1024, 0);
        assert_eq!(cfg.outer_len(), 1536);
        assert_eq!(cfg.symbol_count(), 512);
        assert_eq!(cfg.transmit_len(), 513);
    }

    #[test]
    fn config_validation() {
        assert!(CodecConfig::new(1024, 0).validate().is_ok());
        assert!(CodecConfig::new(3, 0).validate().is_err());
        assert!(CodecConfig::new(0, 0).validate().is_err());
        let mut cfg = CodecConfig::new(8, 0);
        cfg.max_iterations = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = CodecConfig::new(8, 0);
        cfg.reference_symbol = C64::new(2.0, 0.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn frame_invariants_hold_for_every_even_k() {
        let mut rng = SplitMix64::new(5);
        for k in [2usize, 4, 10, 64, 1024] {
            let cfg = CodecConfig::new(k, 11);
            let key = KeyBits::random(k, &mut rng).unwrap();
            let frame = encode_frame(&key, &cfg).unwrap();
            assert_eq!(frame.outer_codeword.len(), 3 * k / 2);
            assert_eq!(frame.psk_symbols.len(), k / 2);
            assert_eq!(frame.diff_symbols.len(), k / 2 + 1);
            frame.check(&cfg).unwrap();
        }
    }

    #[test]
    fn error_fraction_counts_flips() {
        let a = KeyBits::new(alloc::vec![0; 1000]).unwrap();
        let mut flipped = alloc::vec![0u8; 1000];
        for slot in flipped.iter_mut().take(10) {
            *slot = 1;
        }
        let b = KeyBits::new(flipped).unwrap();
        assert!((a.error_fraction(&b).unwrap() - 0.01).abs() < 1e-15);
    }
}
