//! Uncoded differential 8-PSK reference curve.
//!
//! The baseline transmits Gray-labelled phase steps with no coding and
//! detects each step from the phase of `y[i] · conj(y[i-1])` alone. Its error
//! rate is what the turbo scheme's coding gain is measured against.
//!
//! ```
//! use cvqkd_sim::baseline::uncoded_dpsk_baseline;
//!
//! let q = uncoded_dpsk_baseline(f64::INFINITY, 3000, 7).unwrap();
//! assert_eq!(q, 0.0);
//! ```

use anyhow::{ensure, Result};
use cvqkd_core::channel::{transmit, ChannelConfig};
use cvqkd_core::codec::{diff_modulate, step_bits, C64, PSK_ORDER};
use cvqkd_core::rng::{mix, tags, SplitMix64};

/// Error fraction of symbol-by-symbol differential detection over `n_bits`
/// random bits at the given linear SNR.
///
/// Bits are packed three per symbol; the trailing symbol's padding bits are
/// not counted. Fixed seed gives a fixed result.
pub fn uncoded_dpsk_baseline(snr: f64, n_bits: usize, seed: u64) -> Result<f64> {
    ensure!(n_bits >= 1000, "baseline needs at least 1000 bits, got {n_bits}");
    let n_sym = n_bits.div_ceil(3);

    let mut bit_rng = SplitMix64::new(mix(seed ^ tags::BASELINE));
    let steps: Vec<usize> = (0..n_sym)
        .map(|_| (bit_rng.next_u64() % PSK_ORDER as u64) as usize)
        .collect();
    let w: Vec<C64> = steps
        .iter()
        .map(|&m| C64::from_polar(1.0, core::f64::consts::TAU * m as f64 / PSK_ORDER as f64))
        .collect();
    let x = diff_modulate(&w, C64::new(1.0, 0.0))?;

    let channel = ChannelConfig::with_snr(snr, mix(seed ^ tags::BASELINE_NOISE));
    let (y, _) = transmit(&x, &channel)?;

    let mut errors = 0u64;
    let mut counted = 0usize;
    for (i, &sent) in steps.iter().enumerate() {
        let d = y[i + 1] * y[i].conj();
        let frac = d.arg() / core::f64::consts::TAU * PSK_ORDER as f64;
        let detected = (frac.round() as i64).rem_euclid(PSK_ORDER as i64) as usize;
        let sent_bits = step_bits(sent);
        let got_bits = step_bits(detected);
        for t in 0..3 {
            if counted == n_bits {
                break;
            }
            if sent_bits[t] != got_bits[t] {
                errors += 1;
            }
            counted += 1;
        }
    }
    Ok(errors as f64 / n_bits as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cvqkd_core::oracles::dpsk8_ber;

    #[test]
    fn noiseless_detection_is_error_free() {
        assert_eq!(uncoded_dpsk_baseline(f64::INFINITY, 5000, 3).unwrap(), 0.0);
    }

    #[test]
    fn matches_analytic_curve_at_ten_db() {
        let snr = 10.0f64;
        let n_bits = 300_000;
        let q = uncoded_dpsk_baseline(snr, n_bits, 99).unwrap();
        let expected = dpsk8_ber(snr);
        let sigma = (expected * (1.0 - expected) / n_bits as f64).sqrt();
        let dev = (q - expected).abs();
        assert!(dev <= 2.0 * sigma, "measured {q}, analytic {expected}, {dev} > 2x{sigma}");
    }

    #[test]
    fn fixed_seed_fixes_the_result() {
        let a = uncoded_dpsk_baseline(5.0, 2000, 17).unwrap();
        let b = uncoded_dpsk_baseline(5.0, 2000, 17).unwrap();
        assert_eq!(a, b);
        let c = uncoded_dpsk_baseline(5.0, 2000, 18).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_tiny_sample() {
        assert!(uncoded_dpsk_baseline(5.0, 999, 0).is_err());
    }
}
