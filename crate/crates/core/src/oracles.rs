//! Independent reference computations for the verification suites.
//!
//! Everything here recomputes a result the library produces by a different,
//! usually brute-force, route: exhaustive sequence enumeration instead of the
//! forward-backward recursion, codeword enumeration instead of box-plus, a
//! self-contained shuffle instead of the interleaver, quadrature of the exact
//! differential-detection error integral instead of Monte Carlo. The module
//! deliberately duplicates small pieces of arithmetic (generator constants,
//! the Gray table) so a defect in the main path cannot hide in shared code.
//!
//! Compiled for test builds and under the `oracles` feature; not part of the
//! stable API.

use num_complex::Complex;

use crate::math;
use alloc::vec::Vec;

type C64 = Complex<f64>;

// ---------------------------------------------------------------------------
// Reference shuffle
// ---------------------------------------------------------------------------

/// The splitmix64 output sequence, restated locally.
struct Mix64 {
    state: u64,
}

impl Mix64 {
    fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Fisher–Yates shuffle of the identity array: ascending step `i` swaps
/// position `i` with `output mod (i+1)`. This is the normative permutation
/// the interleaver must reproduce.
pub fn fisher_yates_reference(len: usize, seed: u64) -> Vec<usize> {
    let mut arr: Vec<usize> = (0..len).collect();
    let mut rng = Mix64 { state: seed };
    for i in 1..len {
        let j = (rng.next() % (i as u64 + 1)) as usize;
        arr.swap(i, j);
    }
    arr
}

// ---------------------------------------------------------------------------
// Outer-code enumeration
// ---------------------------------------------------------------------------

/// Posterior bit probabilities of one parity triplet by summing over the four
/// codewords of the single-parity-check code. Input LLRs are positive-favours-
/// zero; output is `[P(bit=0), P(bit=1)]` per position.
pub fn spc_posteriors(llrs: [f64; 3]) -> [[f64; 2]; 3] {
    // Both tails computed directly; `1 - P(0)` would lose 8 digits at |l| ~ 20.
    let p0: [f64; 3] = core::array::from_fn(|i| 1.0 / (1.0 + math::exp(-llrs[i])));
    let p1: [f64; 3] = core::array::from_fn(|i| 1.0 / (1.0 + math::exp(llrs[i])));
    let mut acc = [[0.0f64; 2]; 3];
    for info in 0..4u8 {
        let word = [info >> 1 & 1, info & 1, (info >> 1 ^ info) & 1];
        let mut w = 1.0;
        for (i, &b) in word.iter().enumerate() {
            w *= if b == 0 { p0[i] } else { p1[i] };
        }
        for (i, &b) in word.iter().enumerate() {
            acc[i][b as usize] += w;
        }
    }
    core::array::from_fn(|i| {
        let total = acc[i][0] + acc[i][1];
        [acc[i][0] / total, acc[i][1] / total]
    })
}

// ---------------------------------------------------------------------------
// Exhaustive demodulation
// ---------------------------------------------------------------------------

/// Gray label of constellation point `m`, restated as a table.
const GRAY: [usize; 8] = [0, 1, 3, 2, 6, 7, 5, 4];

fn point(m: usize) -> C64 {
    let a = core::f64::consts::TAU * m as f64 / 8.0;
    C64::new(math::cos(a), math::sin(a))
}

/// Per-bit posterior probabilities of a differentially modulated 8-PSK frame
/// by enumeration over all `8^S` step sequences.
///
/// `y` holds `S + 1` samples (the known reference slot first), `prior_llrs`
/// one value per interleaved bit (`3S`), `phase_track` one carrier phase per
/// sample. Returns `[P(bit=0), P(bit=1)]` for each of the `3S` bits.
pub fn exhaustive_dpsk_posteriors(
    y: &[C64],
    noise_variance: f64,
    prior_llrs: &[f64],
    phase_track: &[f64],
    reference: C64,
) -> Vec<[f64; 2]> {
    let s = y.len() - 1;
    assert!(s >= 1 && s <= 8, "enumeration is exponential in the frame length");
    assert_eq!(prior_llrs.len(), 3 * s);
    assert_eq!(phase_track.len(), y.len());

    // Derotated data samples (the reference slot multiplies every sequence
    // equally and is skipped, matching a pinned initial state).
    let yd: Vec<C64> = (1..=s)
        .map(|i| y[i] * C64::new(math::cos(phase_track[i]), -math::sin(phase_track[i])))
        .collect();
    // Per-bit log-priors, tail-stable: ln P(bit) = -ln(1 + e^(∓l)).
    let log_prior: Vec<[f64; 2]> = prior_llrs
        .iter()
        .map(|&l| [-math::ln_1p(math::exp(-l)), -math::ln_1p(math::exp(l))])
        .collect();

    let total = 8usize.pow(s as u32);
    let mut log_w = Vec::with_capacity(total);
    let inv2v = 1.0 / (2.0 * noise_variance);
    let mut steps = alloc::vec![0usize; s];
    for idx in 0..total {
        let mut rem = idx;
        for m in steps.iter_mut() {
            *m = rem % 8;
            rem /= 8;
        }
        let mut state = 0usize;
        let mut lw = 0.0;
        for (j, &m) in steps.iter().enumerate() {
            state = (state + m) % 8;
            let x = point(state) * reference;
            lw -= (yd[j] - x).norm_sqr() * inv2v;
            let g = GRAY[m];
            for t in 0..3 {
                let bit = (g >> (2 - t)) & 1;
                lw += log_prior[3 * j + t][bit];
            }
        }
        log_w.push(lw);
    }

    let hi = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = alloc::vec![[0.0f64; 2]; 3 * s];
    for (idx, &lw) in log_w.iter().enumerate() {
        let w = math::exp(lw - hi);
        let mut rem = idx;
        for j in 0..s {
            let m = rem % 8;
            rem /= 8;
            let g = GRAY[m];
            for t in 0..3 {
                let bit = (g >> (2 - t)) & 1;
                acc[3 * j + t][bit] += w;
            }
        }
    }
    acc.iter()
        .map(|a| {
            let total = a[0] + a[1];
            [a[0] / total, a[1] / total]
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Differential detection error rate
// ---------------------------------------------------------------------------

/// Probability that the differential phase error of symbol-by-symbol 8-PSK
/// detection exceeds `psi` in magnitude, at symbol SNR `gamma`. The exact
/// single-integral form, evaluated by Simpson quadrature.
fn phase_error_exceeds(psi: f64, gamma: f64) -> f64 {
    let c = math::cos(psi);
    let f = |t: f64| {
        let d = 1.0 - c * math::cos(t);
        math::exp(-gamma * d) / d
    };
    let n = 4000usize;
    let (a, b) = (-core::f64::consts::FRAC_PI_2, core::f64::consts::FRAC_PI_2);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    math::sin(psi) / (2.0 * core::f64::consts::PI) * sum * h / 3.0
}

/// Exact bit error rate of uncoded Gray-labelled 8-PSK with differential
/// detection at linear symbol SNR `gamma`.
///
/// Averaging the Gray-label Hamming weight over the eight decision sectors
/// collapses the sector sum to two terms: BER = (A(pi/8) + A(3pi/8)) / 3,
/// where A is the exceedance probability above.
pub fn dpsk8_ber(gamma: f64) -> f64 {
    let pi = core::f64::consts::PI;
    (phase_error_exceeds(pi / 8.0, gamma) + phase_error_exceeds(3.0 * pi / 8.0, gamma)) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffle_is_a_permutation() {
        let p = fisher_yates_reference(100, 42);
        let mut seen = [false; 100];
        for &i in &p {
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert_ne!(p, fisher_yates_reference(100, 43));
    }

    #[test]
    fn spc_enumeration_balances_symmetric_input() {
        let post = spc_posteriors([0.0, 0.0, 0.0]);
        for b in post {
            assert!((b[0] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn spc_enumeration_forces_parity() {
        let post = spc_posteriors([30.0, 30.0, 0.0]);
        assert!(post[2][0] > 0.999_999);
    }

    #[test]
    fn exceedance_matches_closed_form_at_zero_snr() {
        // At gamma = 0 the phase error is uniform on the circle:
        // P(|error| > psi) = 1 - psi/pi.
        let pi = core::f64::consts::PI;
        for psi in [pi / 8.0, 3.0 * pi / 8.0, pi / 2.0] {
            let got = phase_error_exceeds(psi, 0.0);
            assert!((got - (1.0 - psi / pi)).abs() < 1e-10, "psi {psi}: {got}");
        }
    }

    #[test]
    fn dpsk_ber_is_half_at_zero_snr_and_decreasing() {
        assert!((dpsk8_ber(0.0) - 0.5).abs() < 1e-10);
        let mut prev = 0.5;
        for g in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            let ber = dpsk8_ber(g);
            assert!(ber < prev, "gamma {g}");
            prev = ber;
        }
        // The curve decays like e^(-gamma(1 - cos pi/8)): roughly 1e-5 at
        // 20 dB, far below 1e-9 by gamma = 400.
        let high = dpsk8_ber(100.0);
        assert!(high > 1e-7 && high < 1e-4, "gamma 100: {high}");
        let extreme = dpsk8_ber(400.0);
        assert!(extreme > 0.0 && extreme < 1e-9, "gamma 400: {extreme}");
    }
}
