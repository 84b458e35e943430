//! Differential inner modulator.
//!
//! Each PSK symbol is applied as a phase step on top of the previous
//! transmitted symbol: `X[0]` is the known reference, `X[i] = W[i-1]·X[i-1]`.
//! The stage is a rate-1 recursive code over the constellation, which is what
//! gives the serial concatenation its interleaving gain.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

use super::C64;

/// Largest tolerated deviation of an input symbol from unit modulus.
const UNIT_TOL: f64 = 1e-9;

/// Runs the differential recursion over `w`, anchored at `reference`.
///
/// Every product is renormalized to the unit circle so rounding never
/// accumulates across a long frame; the step ratio `X[i]·conj(X[i-1])`
/// still reproduces `W[i-1]` to better than 1e-12.
pub fn diff_modulate(w: &[C64], reference: C64) -> Result<Vec<C64>> {
    for z in w.iter().chain(core::iter::once(&reference)) {
        let r = math::sqrt(z.norm_sqr());
        if !r.is_finite() || (r - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument("differential input symbol must have unit modulus"));
        }
    }
    let mut x = Vec::with_capacity(w.len() + 1);
    x.push(reference);
    let mut prev = reference;
    for &step in w {
        let mut next = step * prev;
        next /= math::sqrt(next.norm_sqr());
        x.push(next);
        prev = next;
    }
    Ok(x)
}
