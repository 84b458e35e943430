//! Iterative demodulation/decoding loop.
//!
//! One reconciliation pass alternates between the trellis demodulator and the
//! outer soft-in/soft-out decoder, routing extrinsic values through the
//! interleaver in both directions. The loop stops early once every outer
//! parity check is satisfied (unless disabled) and otherwise runs a fixed
//! iteration budget, returning the hard decisions on the information bits.

use crate::error::{Error, Result};
use alloc::vec::Vec;

use super::demod::demod_app;
use super::interleaver::Permutation;
use super::outer::{decode_outer_siso, extract_info_bits, unsatisfied_checks};
use super::phase::estimate_phase_track;
use super::{C64, CodecConfig, KeyBits, SoftInfo};

/// How the demodulator obtains its carrier phase track.
#[derive(Debug, Clone)]
pub enum PhaseAssist {
    /// Assume an undisturbed carrier (all-zero track).
    Flat,
    /// Use a caller-supplied track, one phase per received sample.
    Known(Vec<f64>),
    /// Estimate the track from the frame itself with the given loop gain.
    Estimate { bandwidth: f64 },
}

/// Receiver-side view of the channel for one frame.
#[derive(Debug, Clone)]
pub struct ChannelEstimate {
    /// Per-quadrature Gaussian noise variance.
    pub noise_variance: f64,
    /// Carrier phase handling.
    pub phase: PhaseAssist,
}

/// Result of one reconciliation pass.
#[derive(Debug, Clone)]
pub struct ReconcileOutcome {
    /// Hard decisions on the `k` information bits.
    pub key: KeyBits,
    /// Iterations actually executed (at least 1).
    pub iterations: usize,
    /// True when every outer parity check held at the final iteration.
    pub converged: bool,
    /// Unsatisfied parity-check count after each executed iteration.
    pub unsatisfied_history: Vec<usize>,
}

/// Decodes one received frame back into a key estimate.
///
/// `y` must hold `k/2 + 1` samples (reference included). The loop runs at
/// most `cfg.max_iterations` demodulator/decoder exchanges.
pub fn reconcile(y: &[C64], cfg: &CodecConfig, estimate: &ChannelEstimate) -> Result<ReconcileOutcome> {
    cfg.validate()?;
    if y.len() != cfg.transmit_len() {
        return Err(Error::LengthMismatch {
            what: "received frame",
            expected: cfg.transmit_len(),
            got: y.len(),
        });
    }
    let m = cfg.outer_len();
    let perm = Permutation::from_seed(m, cfg.interleaver_seed)?;
    let track = match &estimate.phase {
        PhaseAssist::Flat => alloc::vec![0.0; y.len()],
        PhaseAssist::Known(t) => {
            if t.len() != y.len() {
                return Err(Error::LengthMismatch {
                    what: "phase track",
                    expected: y.len(),
                    got: t.len(),
                });
            }
            t.clone()
        }
        PhaseAssist::Estimate { bandwidth } => estimate_phase_track(y, cfg.reference_symbol, *bandwidth)?,
    };

    let mut prior = SoftInfo::uniform(m);
    let mut history = Vec::with_capacity(cfg.max_iterations);
    let mut hard_outer: Vec<u8> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..cfg.max_iterations {
        iterations += 1;
        let demod_ext = demod_app(
            y,
            estimate.noise_variance,
            Some(&prior),
            &track,
            cfg.reference_symbol,
        )?;
        let outer_channel = perm.invert(&demod_ext.llrs)?;
        let (outer_ext, hard) = decode_outer_siso(&outer_channel)?;
        let unsatisfied = unsatisfied_checks(&hard)?;
        history.push(unsatisfied);
        hard_outer = hard;
        if unsatisfied == 0 {
            converged = true;
            if cfg.early_stop {
                break;
            }
        } else {
            converged = false;
        }
        prior = SoftInfo {
            llrs: perm.apply(&outer_ext.llrs)?,
        };
    }

    Ok(ReconcileOutcome {
        key: extract_info_bits(&hard_outer)?,
        iterations,
        converged,
        unsatisfied_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode_frame;
    use crate::math;
    use crate::rng::SplitMix64;

    fn transmit_awgn(x: &[C64], snr: f64, rng: &mut SplitMix64) -> (Vec<C64>, f64) {
        let var = 1.0 / (2.0 * snr);
        let sigma = math::sqrt(var);
        let y = x
            .iter()
            .map(|&z| {
                let (g1, g2) = rng.next_gaussian_pair();
                z + C64::new(g1 * sigma, g2 * sigma)
            })
            .collect();
        (y, var)
    }

    #[test]
    fn noiseless_round_trip_in_one_iteration() {
        for seed in 0..8u64 {
            let cfg = CodecConfig::new(1024, seed ^ 0xA5);
            let mut rng = SplitMix64::new(seed);
            let key = KeyBits::random(cfg.k, &mut rng).unwrap();
            let frame = encode_frame(&key, &cfg).unwrap();
            let est = ChannelEstimate {
                noise_variance: 1e-6,
                phase: PhaseAssist::Flat,
            };
            let out = reconcile(&frame.diff_symbols, &cfg, &est).unwrap();
            assert_eq!(out.key, key);
            assert!(out.converged);
            assert_eq!(out.iterations, 1);
        }
    }

    #[test]
    fn high_snr_noise_still_converges() {
        let cfg = CodecConfig::new(2048, 77);
        let mut rng = SplitMix64::new(42);
        let key = KeyBits::random(cfg.k, &mut rng).unwrap();
        let frame = encode_frame(&key, &cfg).unwrap();
        let (y, var) = transmit_awgn(&frame.diff_symbols, 100.0, &mut rng);
        let est = ChannelEstimate {
            noise_variance: var,
            phase: PhaseAssist::Flat,
        };
        let out = reconcile(&y, &cfg, &est).unwrap();
        assert_eq!(out.key, key);
        assert!(out.converged);
    }

    #[test]
    fn constant_phase_offset_recovered_with_estimation() {
        let cfg = CodecConfig::new(2048, 3);
        let mut rng = SplitMix64::new(7);
        let key = KeyBits::random(cfg.k, &mut rng).unwrap();
        let frame = encode_frame(&key, &cfg).unwrap();
        let phi = 0.35;
        let rot = C64::new(math::cos(phi), math::sin(phi));
        let rotated: Vec<C64> = frame.diff_symbols.iter().map(|&z| z * rot).collect();
        let (y, var) = transmit_awgn(&rotated, 200.0, &mut rng);
        let est = ChannelEstimate {
            noise_variance: var,
            phase: PhaseAssist::Estimate { bandwidth: 0.05 },
        };
        let out = reconcile(&y, &cfg, &est).unwrap();
        assert_eq!(out.key, key, "offset uncorrected by phase assist");
    }

    #[test]
    fn unsatisfied_checks_shrink_over_early_iterations() {
        // Moderate noise: the first sweep leaves parity failures that the
        // exchange then works off. Averaged over frames the count must not
        // grow across the first three iterations.
        let mut totals = [0usize; 3];
        let mut rng = SplitMix64::new(2024);
        for seed in 0..100u64 {
            let mut cfg = CodecConfig::new(256, seed);
            cfg.early_stop = false;
            cfg.max_iterations = 3;
            let key = KeyBits::random(cfg.k, &mut rng).unwrap();
            let frame = encode_frame(&key, &cfg).unwrap();
            let (y, var) = transmit_awgn(&frame.diff_symbols, 3.0, &mut rng);
            let est = ChannelEstimate {
                noise_variance: var,
                phase: PhaseAssist::Flat,
            };
            let out = reconcile(&y, &cfg, &est).unwrap();
            assert_eq!(out.unsatisfied_history.len(), 3);
            for (t, &u) in totals.iter_mut().zip(&out.unsatisfied_history) {
                *t += u;
            }
        }
        assert!(totals[1] <= totals[0], "{totals:?}");
        assert!(totals[2] <= totals[1], "{totals:?}");
    }

    #[test]
    fn rejects_wrong_frame_length() {
        let cfg = CodecConfig::new(64, 0);
        let est = ChannelEstimate {
            noise_variance: 0.1,
            phase: PhaseAssist::Flat,
        };
        let y = alloc::vec![C64::new(1.0, 0.0); 10];
        assert!(reconcile(&y, &cfg, &est).is_err());
        let bad_track = ChannelEstimate {
            noise_variance: 0.1,
            phase: PhaseAssist::Known(alloc::vec![0.0; 3]),
        };
        let y = alloc::vec![C64::new(1.0, 0.0); cfg.transmit_len()];
        assert!(reconcile(&y, &cfg, &bad_track).is_err());
    }
}
