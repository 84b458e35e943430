//! Forward-backward symbol demodulator.
//!
//! The differential modulator is a rate-1 recursive code over an 8-state
//! trellis whose state is the absolute constellation phase of the transmitted
//! symbol. This stage runs the exact a-posteriori-probability recursion over
//! that trellis: branch metrics are complex Gaussian log-likelihoods of the
//! received samples (derotated by the supplied phase track), the initial state
//! is pinned to the known reference symbol, and the final state is free.
//!
//! All sums are evaluated in the log domain with exact log-sum-exp, so the
//! per-bit output matches brute-force enumeration over all symbol sequences
//! to floating-point accuracy. The returned values are extrinsic: each bit's
//! own prior is cancelled, leaving only the trellis and other-bit evidence.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

use super::psk::{constellation_point, step_bits, PSK_ORDER};
use super::{C64, SoftInfo, LLR_CLAMP};

const Q: usize = PSK_ORDER;

/// Exact log-sum-exp over a fixed-size array.
#[inline]
fn lse(xs: &[f64]) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    for &x in xs {
        if x > hi {
            hi = x;
        }
    }
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    let mut sum = 0.0;
    for &x in xs {
        sum += math::exp(x - hi);
    }
    hi + math::ln(sum)
}

/// A-posteriori demodulation of one received frame.
///
/// * `y` - received samples, reference slot included (`S + 1` values);
/// * `noise_variance` - per-quadrature Gaussian variance;
/// * `prior` - extrinsic LLRs for the `3S` interleaved bits from the outer
///   stage, or `None` for a uniform prior;
/// * `phase_track` - carrier phase per sample, subtracted before metric
///   evaluation (all zero when the channel is undisturbed);
/// * `reference` - the known first transmitted symbol.
///
/// Returns extrinsic LLRs for the `3S` interleaved bits, clamped to
/// `±LLR_CLAMP`.
pub fn demod_app(
    y: &[C64],
    noise_variance: f64,
    prior: Option<&SoftInfo>,
    phase_track: &[f64],
    reference: C64,
) -> Result<SoftInfo> {
    if !(noise_variance > 0.0) || !noise_variance.is_finite() {
        return Err(Error::InvalidArgument("noise variance must be positive and finite"));
    }
    if y.len() < 2 {
        return Err(Error::InvalidArgument("received frame needs the reference and at least one symbol"));
    }
    if phase_track.len() != y.len() {
        return Err(Error::LengthMismatch {
            what: "phase track",
            expected: y.len(),
            got: phase_track.len(),
        });
    }
    if (reference.norm_sqr() - 1.0).abs() > 2e-9 {
        return Err(Error::InvalidArgument("reference symbol must have unit modulus"));
    }
    let s = y.len() - 1;
    let n_bits = 3 * s;
    if let Some(p) = prior {
        if p.len() != n_bits {
            return Err(Error::LengthMismatch {
                what: "demodulator prior",
                expected: n_bits,
                got: p.len(),
            });
        }
    }

    // State q emits the constellation point q rotated onto the reference.
    let states: [C64; Q] = core::array::from_fn(|q| constellation_point(q) * reference);

    // Branch metric table: emit[i][q] = log N(y_i derotated; state q).
    // The common Gaussian normalization constant is dropped; it cancels in
    // every LLR. The reference observation (i = 0) multiplies all paths
    // equally under a pinned initial state, so it is skipped outright.
    let inv2v = 1.0 / (2.0 * noise_variance);
    let mut emit = Vec::with_capacity(s);
    for i in 1..=s {
        let rot = C64::new(math::cos(phase_track[i]), -math::sin(phase_track[i]));
        let yd = y[i] * rot;
        emit.push(core::array::from_fn::<f64, Q, _>(|q| {
            -(yd - states[q]).norm_sqr() * inv2v
        }));
    }

    // Per-symbol log prior over the 8 phase steps, from the per-bit LLRs.
    // A positive LLR favours bit 0: ln P(0) = -softplus(-L), ln P(1) = -softplus(L).
    let mut log_prior = Vec::with_capacity(s);
    match prior {
        None => log_prior.resize(s, [0.0f64; Q]),
        Some(p) => {
            for j in 0..s {
                let lp_bit: [[f64; 2]; 3] = core::array::from_fn(|t| {
                    let l = p.llrs[3 * j + t];
                    [-math::softplus(-l), -math::softplus(l)]
                });
                log_prior.push(core::array::from_fn(|m| {
                    let b = step_bits(m);
                    (0..3).map(|t| lp_bit[t][b[t] as usize]).sum()
                }));
            }
        }
    }

    // Forward pass, normalized per step (a per-row constant shift cancels in
    // the extrinsic differences).
    let mut alpha = Vec::with_capacity(s + 1);
    let mut a0 = [f64::NEG_INFINITY; Q];
    a0[0] = 0.0;
    alpha.push(a0);
    for i in 1..=s {
        let prev = alpha[i - 1];
        let mut next: [f64; Q] = core::array::from_fn(|q| {
            let terms: [f64; Q] =
                core::array::from_fn(|m| prev[(q + Q - m) % Q] + log_prior[i - 1][m]);
            lse(&terms) + emit[i - 1][q]
        });
        let hi = next.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in &mut next {
            *v -= hi;
        }
        alpha.push(next);
    }

    // Backward pass, free final state.
    let mut beta = alloc::vec![[0.0f64; Q]; s + 1];
    for i in (1..=s).rev() {
        let nxt = beta[i];
        let mut cur: [f64; Q] = core::array::from_fn(|p| {
            let terms: [f64; Q] = core::array::from_fn(|m| {
                let q = (p + m) % Q;
                log_prior[i - 1][m] + emit[i - 1][q] + nxt[q]
            });
            lse(&terms)
        });
        let hi = cur.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in &mut cur {
            *v -= hi;
        }
        beta[i - 1] = cur;
    }

    // Per-symbol joint weights and per-bit extrinsic values. The posterior
    // LLR of a bit is the log-ratio of the joint weights over the step sets
    // where that bit is 0 versus 1; subtracting the bit's own prior leaves
    // the extrinsic part.
    let mut ext = Vec::with_capacity(n_bits);
    for j in 0..s {
        let i = j + 1;
        let joint: [f64; Q] = core::array::from_fn(|m| {
            let terms: [f64; Q] = core::array::from_fn(|p| {
                let q = (p + m) % Q;
                alpha[i - 1][p] + emit[i - 1][q] + beta[i][q]
            });
            lse(&terms) + log_prior[j][m]
        });
        for t in 0..3 {
            let mut zero = [f64::NEG_INFINITY; 4];
            let mut one = [f64::NEG_INFINITY; 4];
            let (mut nz, mut no) = (0, 0);
            for (m, &w) in joint.iter().enumerate() {
                if step_bits(m)[t] == 0 {
                    zero[nz] = w;
                    nz += 1;
                } else {
                    one[no] = w;
                    no += 1;
                }
            }
            let own = prior.map_or(0.0, |p| p.llrs[3 * j + t]);
            let e = (lse(&zero) - lse(&one) - own).clamp(-LLR_CLAMP, LLR_CLAMP);
            ext.push(e);
        }
    }
    Ok(SoftInfo { llrs: ext })
}
