//! Gray-labelled 8-PSK mapping.
//!
//! Constellation point `m` sits at phase `2πm/8` and carries the Gray label
//! `m ^ (m >> 1)`, so neighbouring points differ in exactly one bit. Bit
//! triplets are read most-significant first: `(v0, v1, v2)` is the label
//! `4·v0 + 2·v1 + v2`, and the all-zero triplet maps to `1+0i`.

use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use alloc::vec::Vec;

use super::C64;

/// Constellation order; three coded bits per symbol.
pub const PSK_ORDER: usize = 8;

const S: f64 = FRAC_1_SQRT_2;

/// Points in phase order; index `m` is `exp(i·2πm/8)`.
const POINTS: [(f64, f64); PSK_ORDER] = [
    (1.0, 0.0),
    (S, S),
    (0.0, 1.0),
    (-S, S),
    (-1.0, 0.0),
    (-S, -S),
    (0.0, -1.0),
    (S, -S),
];

/// Unit symbol at phase `2πm/8`; `m` is taken modulo 8.
#[inline]
pub fn constellation_point(m: usize) -> C64 {
    let (re, im) = POINTS[m % PSK_ORDER];
    C64::new(re, im)
}

/// Gray label of constellation point `m`, most-significant bit first.
#[inline]
pub fn step_bits(m: usize) -> [u8; 3] {
    let g = (m % PSK_ORDER) ^ ((m % PSK_ORDER) >> 1);
    [(g >> 2) as u8 & 1, (g >> 1) as u8 & 1, g as u8 & 1]
}

/// Constellation point whose Gray label equals the bit triplet.
#[inline]
pub fn step_index(bits: [u8; 3]) -> usize {
    let g = ((bits[0] as usize) << 2) | ((bits[1] as usize) << 1) | bits[2] as usize;
    g ^ (g >> 1) ^ (g >> 2)
}

/// Maps a bit sequence to 8-PSK symbols, three bits per symbol.
pub fn map_psk(bits: &[u8]) -> Result<Vec<C64>> {
    if bits.is_empty() || bits.len() % 3 != 0 {
        return Err(Error::InvalidArgument("bit count must be a nonzero multiple of 3"));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidArgument("symbol bits must be 0 or 1"));
    }
    Ok(bits
        .chunks_exact(3)
        .map(|t| constellation_point(step_index([t[0], t[1], t[2]])))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_triplet_is_the_anchor() {
        let w = map_psk(&[0, 0, 0]).unwrap();
        assert_eq!(w.len(), 1);
        assert!((w[0] - C64::new(1.0, 0.0)).norm_sqr() < 1e-30);
    }

    #[test]
    fn all_symbols_unit_modulus() {
        let bits: Vec<u8> = (0..120).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        for z in map_psk(&bits).unwrap() {
            assert!((z.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn output_length_is_a_third() {
        let bits = alloc::vec![0u8; 1536];
        assert_eq!(map_psk(&bits).unwrap().len(), 512);
    }

    #[test]
    fn rejects_bad_lengths_and_values() {
        assert!(map_psk(&[0, 1]).is_err());
        assert!(map_psk(&[]).is_err());
        assert!(map_psk(&[0, 1, 2]).is_err());
    }

    #[test]
    fn labels_and_indices_are_inverse() {
        for m in 0..PSK_ORDER {
            assert_eq!(step_index(step_bits(m)), m);
        }
    }

    #[test]
    fn adjacent_points_differ_in_one_bit() {
        for m in 0..PSK_ORDER {
            let a = step_bits(m);
            let b = step_bits(m + 1);
            let diff: u32 = a.iter().zip(&b).map(|(x, y)| (x ^ y) as u32).sum();
            assert_eq!(diff, 1, "points {m} and {}", (m + 1) % PSK_ORDER);
        }
    }

    #[test]
    fn points_advance_by_one_eighth_turn() {
        let step = C64::new(S, S);
        for m in 0..PSK_ORDER {
            let expect = constellation_point(m) * step;
            assert!((constellation_point(m + 1) - expect).norm_sqr() < 1e-30);
        }
    }
}
