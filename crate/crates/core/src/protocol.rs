//! Session protocol: state preparation through reconciled key.
//!
//! A session runs two phases over one channel. The Gaussian phase prepares
//! coherent states modulated in both quadratures, measures a random
//! quadrature per state, sifts by announced basis, and estimates the SNR from
//! a disclosed subset. The reconciliation phase then carries frames of fresh
//! random key bits over the same channel with the turbo-DPSK codec, decoding
//! against the estimated parameters, and reports the bit error rate together
//! with the information-rate accounting.

use crate::channel::ChannelConfig;
use crate::codec::{CodecConfig, KeyBits};
use crate::error::{Error, Result};
use crate::rng::{self, SplitMix64};
use alloc::vec::Vec;

#[cfg(feature = "std")]
use crate::channel::{apply_attack, transmit, PhaseModel};
#[cfg(feature = "std")]
use crate::codec::{encode_frame, reconcile, ChannelEstimate, PhaseAssist, DEFAULT_LOOP_BANDWIDTH};
#[cfg(feature = "std")]
use crate::infotheory::{mutual_info_ab, mutual_info_eve, secret_info};

/// Estimates above this value are reported as the cap; a noiseless run would
/// otherwise divide by zero.
pub const SNR_ESTIMATE_CAP: f64 = 1e6;

/// Alice's prepared quadrature values: i.i.d. Gaussian in both quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentStateFrame {
    pub x_values: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Modulation variance the values were drawn with, in shot-noise units.
    pub modulation_variance: f64,
}

impl CoherentStateFrame {
    pub fn len(&self) -> usize {
        self.x_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_values.is_empty()
    }

    /// Alice's value of state `i` in the given quadrature.
    pub fn quadrature(&self, basis: Basis, i: usize) -> f64 {
        match basis {
            Basis::X => self.x_values[i],
            Basis::P => self.p_values[i],
        }
    }
}

/// Measurement quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    X,
    P,
}

/// One retained state after sifting: its index and the announced quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiftedIndex {
    pub index: usize,
    pub basis: Basis,
}

/// Wall-clock accounting for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingMode {
    /// Measure elapsed wall time.
    Wall,
    /// Report zero; keeps serialized reports byte-stable across runs.
    Off,
}

/// Parameters of one full session.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    /// Coherent states in the Gaussian phase.
    pub n_states: usize,
    /// Modulation variance `V_A` in shot-noise units.
    pub modulation_variance: f64,
    /// Fraction of sifted data disclosed for parameter estimation, in (0, 1).
    pub disclosed_fraction: f64,
    /// Key frames in the reconciliation phase.
    pub frames: usize,
    pub codec: CodecConfig,
    pub channel: ChannelConfig,
    pub master_seed: u64,
    pub timing: TimingMode,
}

impl SessionConfig {
    /// Session over a clean channel at the given linear SNR, with defaults
    /// sized for parameter estimation (20000 states, 10% disclosure).
    pub fn with_snr(snr: f64, k: usize, frames: usize, master_seed: u64) -> Self {
        Self {
            n_states: 20_000,
            modulation_variance: snr,
            disclosed_fraction: 0.1,
            frames,
            codec: CodecConfig::new(k, rng::mix(master_seed ^ 0x494c_5645)),
            channel: ChannelConfig::with_snr(snr, 0),
            master_seed,
            timing: TimingMode::Wall,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_states == 0 {
            return Err(Error::InvalidArgument("session needs at least one state"));
        }
        if !(self.modulation_variance > 0.0) {
            return Err(Error::InvalidArgument("modulation variance must be positive"));
        }
        if !(self.disclosed_fraction > 0.0 && self.disclosed_fraction < 1.0) {
            return Err(Error::InvalidArgument("disclosed fraction must lie strictly in (0, 1)"));
        }
        if self.frames == 0 {
            return Err(Error::InvalidArgument("session needs at least one frame"));
        }
        self.codec.validate()?;
        self.channel.validate()
    }
}

/// Aggregated result of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionReport {
    /// Fraction of key bits that differ after reconciliation.
    pub qber: f64,
    /// SNR estimated from the disclosed subset (capped at
    /// [`SNR_ESTIMATE_CAP`]).
    pub snr_estimate: f64,
    /// Receiver rate at the estimated SNR, bits per use.
    pub i_ab: f64,
    /// Listener rate under the configured attack, bits per use.
    pub i_ae: f64,
    /// `i_ab - i_ae`.
    pub i_s: f64,
    /// Mean decoder iterations per completed frame.
    pub iterations_mean: f64,
    /// Elapsed seconds (zero under [`TimingMode::Off`]).
    pub wall_time_seconds: f64,
    /// Completed frames.
    pub frames: usize,
    /// Key bits compared; `frames · k`.
    pub bits: u64,
}

// ---------------------------------------------------------------------------
// Gaussian phase
// ---------------------------------------------------------------------------

/// Draws `n` coherent states with both quadratures i.i.d. `N(0, v_a)`.
pub fn prepare_states(n: usize, v_a: f64, seed: u64) -> Result<CoherentStateFrame> {
    if n == 0 {
        return Err(Error::InvalidArgument("state count must be positive"));
    }
    if !(v_a > 0.0) || !v_a.is_finite() {
        return Err(Error::InvalidArgument("modulation variance must be positive and finite"));
    }
    let sigma = crate::math::sqrt(v_a);
    let mut rng = SplitMix64::new(seed);
    let mut x_values = Vec::with_capacity(n);
    let mut p_values = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, p) = rng.next_gaussian_pair();
        x_values.push(x * sigma);
        p_values.push(p * sigma);
    }
    Ok(CoherentStateFrame {
        x_values,
        p_values,
        modulation_variance: v_a,
    })
}

/// Bob's measurement: a uniformly random quadrature per state, carried over
/// the channel.
///
/// Values are on Bob's rescaled equivalent channel `y = q_A + n` with noise
/// variance `V_A / snr`, so the configured SNR is exactly the ratio of
/// modulation variance to measurement noise. Basis and noise draws come from
/// independent streams derived from `seed`.
pub fn measure_quadratures(
    frame: &CoherentStateFrame,
    cfg: &ChannelConfig,
    seed: u64,
) -> Result<(Vec<f64>, Vec<Basis>)> {
    if frame.is_empty() {
        return Err(Error::InvalidArgument("cannot measure an empty frame"));
    }
    cfg.validate()?;
    let noise_var = if cfg.snr.is_infinite() {
        0.0
    } else {
        frame.modulation_variance / cfg.snr
    };
    let sigma = crate::math::sqrt(noise_var);
    let mut basis_rng = SplitMix64::new(rng::mix(seed ^ rng::tags::BASES));
    let mut noise_rng = SplitMix64::new(rng::mix(seed ^ rng::tags::MEASURE_NOISE));
    let mut values = Vec::with_capacity(frame.len());
    let mut bases = Vec::with_capacity(frame.len());
    for i in 0..frame.len() {
        let basis = if basis_rng.next_bool() { Basis::X } else { Basis::P };
        let value = frame.quadrature(basis, i) + sigma * noise_rng.next_gaussian();
        values.push(value);
        bases.push(basis);
    }
    Ok((values, bases))
}

/// Sifting after basis announcement.
///
/// Alice modulated both quadratures, so every state is retained; the result
/// is the full index list tagged with Bob's announced quadrature.
pub fn sift(frame: &CoherentStateFrame, bob_bases: &[Basis]) -> Result<Vec<SiftedIndex>> {
    if frame.len() != bob_bases.len() {
        return Err(Error::LengthMismatch {
            what: "sifting input",
            expected: frame.len(),
            got: bob_bases.len(),
        });
    }
    Ok(bob_bases
        .iter()
        .enumerate()
        .map(|(index, &basis)| SiftedIndex { index, basis })
        .collect())
}

// ---------------------------------------------------------------------------
// Parameter estimation
// ---------------------------------------------------------------------------

fn unbiased_variance(samples: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = samples.clone().count();
    let mean = samples.clone().sum::<f64>() / n as f64;
    samples.map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64
}

/// Estimates the channel SNR from a randomly disclosed subset.
///
/// On the disclosed indices, the estimate is `Var(alice) / Var(bob - alice)`
/// with unbiased sample variances, capped at [`SNR_ESTIMATE_CAP`]. Returns
/// the estimate together with the disclosed indices (ascending) so the caller
/// can exclude them from key material.
pub fn estimate_snr(
    alice_values: &[f64],
    bob_values: &[f64],
    disclosed_fraction: f64,
    seed: u64,
) -> Result<(f64, Vec<usize>)> {
    if alice_values.len() != bob_values.len() {
        return Err(Error::LengthMismatch {
            what: "estimation input",
            expected: alice_values.len(),
            got: bob_values.len(),
        });
    }
    if alice_values.len() < 100 {
        return Err(Error::InsufficientData {
            needed: 100,
            got: alice_values.len(),
        });
    }
    if !(disclosed_fraction > 0.0 && disclosed_fraction < 1.0) {
        return Err(Error::InvalidArgument("disclosed fraction must lie strictly in (0, 1)"));
    }
    let n = alice_values.len();
    let count = (disclosed_fraction * n as f64) as usize;
    if count < 30 {
        return Err(Error::InsufficientData { needed: 30, got: count });
    }

    // Partial Fisher-Yates: the first `count` slots of a seeded shuffle.
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(rng::mix(seed ^ rng::tags::DISCLOSE));
    for i in 0..count {
        let j = i + (rng.next_u64() % (n - i) as u64) as usize;
        indices.swap(i, j);
    }
    let mut disclosed: Vec<usize> = indices[..count].to_vec();
    disclosed.sort_unstable();

    let signal = unbiased_variance(disclosed.iter().map(|&i| alice_values[i]));
    let noise = unbiased_variance(disclosed.iter().map(|&i| bob_values[i] - alice_values[i]));
    let snr = if noise > 0.0 {
        (signal / noise).min(SNR_ESTIMATE_CAP)
    } else {
        SNR_ESTIMATE_CAP
    };
    Ok((snr, disclosed))
}

/// Bit error fraction between two keys of equal length.
pub fn compute_qber(a: &KeyBits, b: &KeyBits) -> Result<f64> {
    a.error_fraction(b)
}

// ---------------------------------------------------------------------------
// Full session
// ---------------------------------------------------------------------------

/// Runs a complete session: Gaussian phase, estimation, then `frames` rounds
/// of turbo-DPSK reconciliation over the same channel.
///
/// Per-frame failures are skipped and absorbed into the completed-frame
/// count; the session only errors when its configuration is invalid or no
/// frame completes.
#[cfg(feature = "std")]
pub fn run_session(cfg: &SessionConfig) -> Result<SessionReport> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let channel = apply_attack(&cfg.channel)?;
    let master = cfg.master_seed;

    // Gaussian phase.
    let alice = prepare_states(
        cfg.n_states,
        cfg.modulation_variance,
        rng::mix(master ^ rng::tags::STATES),
    )?;
    let (bob_values, bases) = measure_quadratures(&alice, &channel, master)?;
    let sifted = sift(&alice, &bases)?;
    let alice_values: Vec<f64> = sifted
        .iter()
        .map(|s| alice.quadrature(s.basis, s.index))
        .collect();
    let (snr_estimate, _disclosed) =
        estimate_snr(&alice_values, &bob_values, cfg.disclosed_fraction, master)?;

    // Reconciliation phase against the estimated parameters.
    let estimate = ChannelEstimate {
        noise_variance: 1.0 / (2.0 * snr_estimate),
        phase: match channel.phase_model {
            PhaseModel::None => PhaseAssist::Flat,
            _ => PhaseAssist::Estimate {
                bandwidth: DEFAULT_LOOP_BANDWIDTH,
            },
        },
    };
    let mut error_bits = 0u64;
    let mut bits = 0u64;
    let mut iterations = 0usize;
    let mut completed = 0usize;
    let mut last_err = None;
    for f in 0..cfg.frames {
        let outcome = (|| -> Result<(f64, usize)> {
            let key_seed = rng::mix(master ^ rng::tags::KEY.wrapping_add(f as u64));
            let key = KeyBits::random(cfg.codec.k, &mut SplitMix64::new(key_seed))?;
            let coded = encode_frame(&key, &cfg.codec)?;
            let mut frame_channel = channel.clone();
            frame_channel.noise_seed = rng::mix(master ^ rng::tags::FRAME_NOISE.wrapping_add(f as u64));
            let (y, _true_phase) = transmit(&coded.diff_symbols, &frame_channel)?;
            let out = reconcile(&y, &cfg.codec, &estimate)?;
            Ok((compute_qber(&key, &out.key)?, out.iterations))
        })();
        match outcome {
            Ok((frame_qber, iters)) => {
                error_bits += (frame_qber * cfg.codec.k as f64).round() as u64;
                bits += cfg.codec.k as u64;
                iterations += iters;
                completed += 1;
            }
            Err(e) => last_err = Some(e),
        }
    }
    if completed == 0 {
        return Err(last_err.unwrap_or(Error::InvalidArgument("no frame completed")));
    }

    let i_ab = mutual_info_ab(snr_estimate)?;
    let i_ae = mutual_info_eve(
        cfg.modulation_variance,
        channel.transmission,
        channel.excess_noise,
        channel.attack,
    )?;
    let i_s = secret_info(i_ab, i_ae)?;
    Ok(SessionReport {
        qber: error_bits as f64 / bits as f64,
        snr_estimate,
        i_ab,
        i_ae,
        i_s,
        iterations_mean: iterations as f64 / completed as f64,
        wall_time_seconds: match cfg.timing {
            TimingMode::Wall => start.elapsed().as_secs_f64(),
            TimingMode::Off => 0.0,
        },
        frames: completed,
        bits,
    })
}
