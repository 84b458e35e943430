//! Single-parity-check outer code.
//!
//! Each information pair `(b0, b1)` is extended to the codeword `(b0, b1,
//! b0 ^ b1)` - the [3,2,2] block code, rate 2/3. Decoding is soft-in/soft-out:
//! the extrinsic value of each bit is the box-plus combination of the other
//! two, the exact log-domain form of "this bit must equal the XOR of the
//! rest".

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

use super::{KeyBits, SoftInfo, LLR_CLAMP};

/// Expands a key frame into the outer codeword `V`, three bits per input
/// pair; `|V| = 3k/2`.
pub fn encode_outer(key: &KeyBits) -> Vec<u8> {
    let bits = key.bits();
    let mut v = Vec::with_capacity(3 * bits.len() / 2);
    for pair in bits.chunks_exact(2) {
        v.push(pair[0]);
        v.push(pair[1]);
        v.push(pair[0] ^ pair[1]);
    }
    v
}

/// Exact box-plus: the LLR of the XOR of two bits with LLRs `a` and `b`.
///
/// `ln((1 + e^{a+b}) / (e^a + e^b))`, evaluated through softplus/logaddexp so
/// it never overflows.
#[inline]
fn box_plus(a: f64, b: f64) -> f64 {
    math::softplus(a + b) - math::logaddexp(a, b)
}

/// Soft-in/soft-out pass over the outer code.
///
/// `channel_llrs` holds one LLR per codeword bit, triplet-aligned. Returns the
/// extrinsic LLRs (clamped to `±LLR_CLAMP`) and the hard decision per bit,
/// taken from the sign of channel plus extrinsic (ties decide 0).
pub fn decode_outer_siso(channel_llrs: &[f64]) -> Result<(SoftInfo, Vec<u8>)> {
    if channel_llrs.is_empty() || channel_llrs.len() % 3 != 0 {
        return Err(Error::InvalidArgument("LLR count must be a nonzero multiple of 3"));
    }
    if channel_llrs.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument("channel LLRs must be finite"));
    }
    let mut ext = Vec::with_capacity(channel_llrs.len());
    let mut hard = Vec::with_capacity(channel_llrs.len());
    for t in channel_llrs.chunks_exact(3) {
        let e = [
            box_plus(t[1], t[2]),
            box_plus(t[0], t[2]),
            box_plus(t[0], t[1]),
        ];
        for (l, e) in t.iter().zip(e) {
            let e = e.clamp(-LLR_CLAMP, LLR_CLAMP);
            ext.push(e);
            hard.push(if l + e >= 0.0 { 0 } else { 1 });
        }
    }
    Ok((SoftInfo { llrs: ext }, hard))
}

/// Information bits of a codeword: the first two bits of every triplet.
pub fn extract_info_bits(codeword: &[u8]) -> Result<KeyBits> {
    if codeword.is_empty() || codeword.len() % 3 != 0 {
        return Err(Error::InvalidArgument("codeword length must be a nonzero multiple of 3"));
    }
    let mut bits = Vec::with_capacity(2 * codeword.len() / 3);
    for t in codeword.chunks_exact(3) {
        bits.push(t[0]);
        bits.push(t[1]);
    }
    KeyBits::new(bits)
}

/// Number of triplets whose parity check fails (`b0 ^ b1 != b2`).
pub fn unsatisfied_checks(codeword: &[u8]) -> Result<usize> {
    if codeword.is_empty() || codeword.len() % 3 != 0 {
        return Err(Error::InvalidArgument("codeword length must be a nonzero multiple of 3"));
    }
    Ok(codeword
        .chunks_exact(3)
        .filter(|t| t[0] ^ t[1] != t[2])
        .count())
}
