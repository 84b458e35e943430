//! Carrier phase tracking.
//!
//! A decision-directed first-order loop: each sample is derotated by the
//! current estimate, sliced to the nearest constellation phase, and the
//! residual angle drives the estimate through a single-pole low-pass filter.
//! The known reference symbol anchors the starting phase, which also resolves
//! the eightfold ambiguity a blind estimator would have.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

use super::psk::PSK_ORDER;
use super::C64;

/// Default loop gain: low enough to average symbol noise, fast enough to
/// follow the slow drifts this channel produces.
pub const DEFAULT_LOOP_BANDWIDTH: f64 = 0.05;

const SECTOR: f64 = core::f64::consts::TAU / PSK_ORDER as f64;

/// Wraps an angle to `(-pi, pi]`.
#[inline]
fn wrap(x: f64) -> f64 {
    math::atan2(math::sin(x), math::cos(x))
}

/// Estimates the carrier phase under each received sample.
///
/// `bandwidth` is the loop gain in `(0, 1]`; the output has one phase per
/// sample and is suitable as the `phase_track` input of the demodulator.
pub fn estimate_phase_track(y: &[C64], reference: C64, bandwidth: f64) -> Result<Vec<f64>> {
    if y.is_empty() {
        return Err(Error::InvalidArgument("phase estimation needs at least one sample"));
    }
    if !(bandwidth > 0.0 && bandwidth <= 1.0) {
        return Err(Error::InvalidArgument("loop bandwidth must lie in (0, 1]"));
    }
    if (reference.norm_sqr() - 1.0).abs() > 2e-9 {
        return Err(Error::InvalidArgument("reference symbol must have unit modulus"));
    }
    let mut track = Vec::with_capacity(y.len());
    // The first transmitted symbol is known, so its observed angle offset is
    // a direct, unambiguous phase measurement.
    let mut theta = arg(y[0] * reference.conj());
    track.push(theta);
    for &sample in &y[1..] {
        let rot = C64::new(math::cos(theta), -math::sin(theta));
        let residual = arg(sample * rot * reference.conj());
        // Distance to the nearest constellation phase; decisions themselves
        // are left to the demodulator.
        let err = residual - SECTOR * round_half_away(residual / SECTOR);
        theta = wrap(theta + bandwidth * err);
        track.push(theta);
    }
    Ok(track)
}

#[inline]
fn arg(z: C64) -> f64 {
    math::atan2(z.im, z.re)
}

#[inline]
fn round_half_away(x: f64) -> f64 {
    if x >= 0.0 {
        (x + 0.5) as i64 as f64
    } else {
        -((0.5 - x) as i64 as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode_frame, CodecConfig, KeyBits};
    use crate::rng::SplitMix64;

    fn frame_symbols(k: usize, seed: u64) -> (CodecConfig, Vec<C64>) {
        let cfg = CodecConfig::new(k, 13);
        let mut rng = SplitMix64::new(seed);
        let key = KeyBits::random(k, &mut rng).unwrap();
        (cfg.clone(), encode_frame(&key, &cfg).unwrap().diff_symbols)
    }

    #[test]
    fn undisturbed_frame_tracks_zero() {
        let (cfg, x) = frame_symbols(128, 2);
        let track = estimate_phase_track(&x, cfg.reference_symbol, 0.05).unwrap();
        assert!(track.iter().all(|&t| math::abs(t) < 1e-12));
    }

    #[test]
    fn constant_offset_is_locked_from_the_reference() {
        let (cfg, x) = frame_symbols(128, 4);
        let phi = 0.3;
        let rot = C64::new(math::cos(phi), math::sin(phi));
        let y: Vec<C64> = x.iter().map(|&z| z * rot).collect();
        let track = estimate_phase_track(&y, cfg.reference_symbol, 0.05).unwrap();
        for &t in &track {
            assert!(math::abs(t - phi) < 1e-9, "estimate {t}");
        }
    }

    #[test]
    fn follows_a_slow_random_walk() {
        let (cfg, x) = frame_symbols(2048, 6);
        let mut rng = SplitMix64::new(99);
        let mut phi = 0.0;
        let mut truth = Vec::with_capacity(x.len());
        let mut y = Vec::with_capacity(x.len());
        for (i, &z) in x.iter().enumerate() {
            if i > 0 {
                phi += 0.01 * rng.next_gaussian();
            }
            truth.push(phi);
            y.push(z * C64::new(math::cos(phi), math::sin(phi)));
        }
        let track = estimate_phase_track(&y, cfg.reference_symbol, 0.1).unwrap();
        let tail = 64;
        let mse: f64 = track
            .iter()
            .zip(&truth)
            .skip(tail)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / (track.len() - tail) as f64;
        assert!(mse < 0.01, "tracking mse {mse}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let y = [C64::new(1.0, 0.0)];
        assert!(estimate_phase_track(&[], C64::new(1.0, 0.0), 0.05).is_err());
        assert!(estimate_phase_track(&y, C64::new(1.0, 0.0), 0.0).is_err());
        assert!(estimate_phase_track(&y, C64::new(1.0, 0.0), 1.5).is_err());
        assert!(estimate_phase_track(&y, C64::new(0.3, 0.0), 0.05).is_err());
    }
}
