//! Information-rate accounting.
//!
//! Shannon rates of the Gaussian channels seen by the receiver and by the
//! listener, and the secret information: their difference, whose sign marks
//! the secure operating regime. Under the beam-splitter strategy on a
//! lossless-excess channel the sign flips exactly at 50% transmission: the
//! direct-reconciliation 3 dB limit.

use crate::channel::{effective_snr, Attack};
use crate::error::{Error, Result};
use crate::math;

/// Receiver rate of the Gaussian channel: `log2(1 + snr) / 2` bits per use.
pub fn mutual_info_ab(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(Error::InvalidArgument("snr must be >= 0"));
    }
    if snr.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(0.5 * math::log2(1.0 + snr))
}

/// Listener rate under the given strategy.
///
/// The listener's port sees transmission `1 - g` and the complementary share
/// of the excess noise, so `snr_E = (1-g)·v_a / (1 + (1-g)·zeta)`; with no
/// strategy on the line the rate is zero. A beam splitter is only consistent
/// with zero excess noise.
pub fn mutual_info_eve(v_a: f64, g: f64, zeta: f64, attack: Attack) -> Result<f64> {
    if !(v_a > 0.0) {
        return Err(Error::InvalidArgument("modulation variance must be positive"));
    }
    if !(g > 0.0 && g <= 1.0) {
        return Err(Error::InvalidArgument("transmission must lie in (0, 1]"));
    }
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(Error::InvalidArgument("excess noise must be finite and >= 0"));
    }
    match attack {
        Attack::None => Ok(0.0),
        Attack::BeamSplitter => {
            if zeta > 0.0 {
                return Err(Error::InvalidArgument(
                    "beam-splitter attack requires zero excess noise",
                ));
            }
            eve_rate(v_a, g, 0.0)
        }
        Attack::EntanglingCloner => eve_rate(v_a, g, zeta),
    }
}

fn eve_rate(v_a: f64, g: f64, zeta: f64) -> Result<f64> {
    let tap = 1.0 - g;
    if tap == 0.0 {
        return Ok(0.0);
    }
    let snr_e = tap * v_a / (1.0 + tap * zeta);
    Ok(0.5 * math::log2(1.0 + snr_e))
}

/// Secret information: receiver rate minus listener rate. Negative values
/// mean the operating point leaks more than it delivers.
pub fn secret_info(i_ab: f64, i_ae: f64) -> Result<f64> {
    if !i_ab.is_finite() || !i_ae.is_finite() {
        return Err(Error::InvalidArgument("rates must be finite"));
    }
    Ok(i_ab - i_ae)
}

/// One point of the rate-versus-SNR picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    /// Linear receiver SNR.
    pub snr: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_s: f64,
}

/// Assembles the three rates for a link `(v_a, g, zeta)` under `attack`.
pub fn rate_point(v_a: f64, g: f64, zeta: f64, attack: Attack) -> Result<RatePoint> {
    let snr = effective_snr(v_a, g, zeta)?;
    let i_ab = mutual_info_ab(snr)?;
    let i_ae = mutual_info_eve(v_a, g, zeta, attack)?;
    let i_s = secret_info(i_ab, i_ae)?;
    Ok(RatePoint { snr, i_ab, i_ae, i_s })
}
