//! Gaussian channel model.
//!
//! The link is parameterized by transmission `G` (fraction of signal power
//! that survives), excess noise `zeta` in shot-noise units, and the symbol
//! SNR seen by the receiver after rescaling. Unit-energy symbols acquire
//! complex Gaussian noise of per-quadrature variance `1/(2·snr)`, optionally
//! on top of a carrier phase disturbance. Eavesdropping strategies never
//! touch the transmitted amplitudes; they only change which SNR the
//! information-rate accounting assigns to the listener.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::math;
use crate::rng::{self, SplitMix64};
use alloc::vec::Vec;

type C64 = Complex<f64>;

/// Carrier phase disturbance along a frame.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseModel {
    /// Undisturbed carrier.
    None,
    /// Fixed offset in radians.
    Constant(f64),
    /// Gaussian random walk, starting at zero on the reference slot.
    RandomWalk { step_stddev: f64 },
}

/// Eavesdropping strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attack {
    /// No listener on the line.
    None,
    /// The listener collects the complementary port of the loss: a tap of
    /// transmission `1 - G`. Consistent only with zero excess noise.
    BeamSplitter,
    /// The listener injects correlated noise and purifies it; modelled at
    /// the SNR level only, leaving Bob's channel parameters unchanged.
    EntanglingCloner,
}

/// What the listener holds after an attack is applied; bookkeeping for the
/// information-rate module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveTap {
    /// Fraction of the signal power on the listener's port, `1 - G`.
    pub transmission: f64,
    /// Excess noise referred to the listener's port.
    pub excess_noise: f64,
}

/// Channel parameters for one frame or session.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// Transmission in `(0, 1]`.
    pub transmission: f64,
    /// Excess noise in shot-noise units, `>= 0`.
    pub excess_noise: f64,
    /// Linear symbol SNR seen by the receiver; `> 0` (infinite means
    /// noiseless).
    pub snr: f64,
    pub phase_model: PhaseModel,
    pub attack: Attack,
    /// Seed of the noise and phase draws for this frame.
    pub noise_seed: u64,
    /// Listener bookkeeping, populated by [`apply_attack`].
    pub eve_tap: Option<EveTap>,
}

impl ChannelConfig {
    /// A clean lossless channel at the given linear SNR.
    pub fn with_snr(snr: f64, noise_seed: u64) -> Self {
        Self {
            transmission: 1.0,
            excess_noise: 0.0,
            snr,
            phase_model: PhaseModel::None,
            attack: Attack::None,
            noise_seed,
            eve_tap: None,
        }
    }

    /// Channel whose SNR follows from the link budget: modulation variance
    /// `v_a`, transmission `g`, excess noise `zeta`.
    pub fn from_link(v_a: f64, g: f64, zeta: f64, noise_seed: u64) -> Result<Self> {
        let snr = effective_snr(v_a, g, zeta)?;
        Ok(Self {
            transmission: g,
            excess_noise: zeta,
            snr,
            phase_model: PhaseModel::None,
            attack: Attack::None,
            noise_seed,
            eve_tap: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.transmission > 0.0 && self.transmission <= 1.0) {
            return Err(Error::InvalidArgument("transmission must lie in (0, 1]"));
        }
        if !(self.excess_noise >= 0.0) || !self.excess_noise.is_finite() {
            return Err(Error::InvalidArgument("excess noise must be finite and >= 0"));
        }
        if !(self.snr > 0.0) {
            return Err(Error::InvalidArgument("snr must be positive"));
        }
        match self.phase_model {
            PhaseModel::Constant(p) if !p.is_finite() => {
                return Err(Error::InvalidArgument("constant phase must be finite"));
            }
            PhaseModel::RandomWalk { step_stddev } if !(step_stddev >= 0.0) || !step_stddev.is_finite() => {
                return Err(Error::InvalidArgument("phase step deviation must be finite and >= 0"));
            }
            _ => {}
        }
        if self.attack == Attack::BeamSplitter && self.excess_noise > 0.0 {
            return Err(Error::InvalidArgument(
                "beam-splitter attack requires zero excess noise",
            ));
        }
        Ok(())
    }

    /// Per-quadrature noise variance for unit-energy symbols.
    pub fn noise_variance(&self) -> f64 {
        if self.snr.is_infinite() {
            0.0
        } else {
            1.0 / (2.0 * self.snr)
        }
    }
}

/// The phase disturbance a frame actually experienced, one value per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrack {
    pub phases: Vec<f64>,
}

impl PhaseTrack {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Sends a symbol frame through the channel: phase disturbance, then additive
/// complex Gaussian noise of per-quadrature variance `1/(2·snr)`.
///
/// Deterministic in `cfg.noise_seed`. Returns the received samples and the
/// true phase track (useful as a genie reference; receivers normally estimate
/// their own).
pub fn transmit(x: &[C64], cfg: &ChannelConfig) -> Result<(Vec<C64>, PhaseTrack)> {
    cfg.validate()?;
    if x.is_empty() {
        return Err(Error::InvalidArgument("cannot transmit an empty frame"));
    }
    for z in x {
        let r = math::sqrt(z.norm_sqr());
        if !r.is_finite() || (r - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("transmitted symbols must have unit modulus"));
        }
    }
    let sigma = math::sqrt(cfg.noise_variance());
    let mut noise_rng = SplitMix64::new(cfg.noise_seed);
    let mut phase_rng = SplitMix64::new(rng::mix(cfg.noise_seed ^ rng::tags::PHASE));
    let mut phases = Vec::with_capacity(x.len());
    let mut y = Vec::with_capacity(x.len());
    let mut walk = 0.0;
    for (i, &z) in x.iter().enumerate() {
        let phi = match cfg.phase_model {
            PhaseModel::None => 0.0,
            PhaseModel::Constant(p) => p,
            PhaseModel::RandomWalk { step_stddev } => {
                if i > 0 {
                    walk += step_stddev * phase_rng.next_gaussian();
                }
                walk
            }
        };
        phases.push(phi);
        let rotated = z * C64::new(math::cos(phi), math::sin(phi));
        let (g1, g2) = noise_rng.next_gaussian_pair();
        y.push(rotated + C64::new(g1 * sigma, g2 * sigma));
    }
    Ok((y, PhaseTrack { phases }))
}

/// Receiver SNR from the link budget: signal `G·V_A` over shot noise plus
/// excess `1 + G·zeta`, all in shot-noise units.
pub fn effective_snr(v_a: f64, g: f64, zeta: f64) -> Result<f64> {
    if !(v_a > 0.0) {
        return Err(Error::InvalidArgument("modulation variance must be positive"));
    }
    if !(g > 0.0 && g <= 1.0) {
        return Err(Error::InvalidArgument("transmission must lie in (0, 1]"));
    }
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(Error::InvalidArgument("excess noise must be finite and >= 0"));
    }
    Ok(g * v_a / (1.0 + g * zeta))
}

/// Transmission of a fiber of length `length_km` at `alpha_db_per_km`:
/// `10^(-alpha·L/10)`.
pub fn attenuation_to_transmission(alpha_db_per_km: f64, length_km: f64) -> Result<f64> {
    if !(alpha_db_per_km >= 0.0) || !alpha_db_per_km.is_finite() {
        return Err(Error::InvalidArgument("attenuation must be finite and >= 0"));
    }
    if !(length_km >= 0.0) || !length_km.is_finite() {
        return Err(Error::InvalidArgument("fiber length must be finite and >= 0"));
    }
    Ok(math::powf(10.0, -alpha_db_per_km * length_km / 10.0))
}

/// Applies the configured attack's bookkeeping: validates consistency and
/// records the listener's tap. Transmitted amplitudes are never modified.
pub fn apply_attack(cfg: &ChannelConfig) -> Result<ChannelConfig> {
    cfg.validate()?;
    let mut out = cfg.clone();
    out.eve_tap = match cfg.attack {
        Attack::None => None,
        Attack::BeamSplitter => Some(EveTap {
            transmission: 1.0 - cfg.transmission,
            excess_noise: 0.0,
        }),
        Attack::EntanglingCloner => Some(EveTap {
            transmission: 1.0 - cfg.transmission,
            excess_noise: cfg.excess_noise,
        }),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::constellation_point;

    fn unit_frame(n: usize, seed: u64) -> Vec<C64> {
        let mut rng = SplitMix64::new(seed);
        (0..n)
            .map(|_| constellation_point((rng.next_u64() % 8) as usize))
            .collect()
    }

    #[test]
    fn noiseless_channel_is_the_identity() {
        let x = unit_frame(64, 1);
        let cfg = ChannelConfig::with_snr(f64::INFINITY, 9);
        let (y, track) = transmit(&x, &cfg).unwrap();
        assert_eq!(y, x);
        assert!(track.phases.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn same_seed_same_output() {
        let x = unit_frame(256, 2);
        let cfg = ChannelConfig::with_snr(2.0, 77);
        let (y1, _) = transmit(&x, &cfg).unwrap();
        let (y2, _) = transmit(&x, &cfg).unwrap();
        assert_eq!(y1, y2);
        let other = ChannelConfig::with_snr(2.0, 78);
        let (y3, _) = transmit(&x, &other).unwrap();
        assert_ne!(y1, y3);
    }

    #[test]
    fn noise_variance_matches_the_snr() {
        // Sample variance of a Gaussian is chi-square distributed with
        // standard error sigma^2·sqrt(2/(n-1)); three standard errors is the
        // acceptance band.
        let n = 1_000_000usize;
        let x = alloc::vec![C64::new(1.0, 0.0); n];
        let cfg = ChannelConfig::with_snr(2.0, 4242);
        let (y, _) = transmit(&x, &cfg).unwrap();
        let var_expect = 0.25;
        for quad in 0..2 {
            let samples: Vec<f64> = y
                .iter()
                .map(|z| if quad == 0 { z.re - 1.0 } else { z.im })
                .collect();
            let mean: f64 = samples.iter().sum::<f64>() / n as f64;
            let var: f64 =
                samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64;
            let se = var_expect * math::sqrt(2.0 / (n as f64 - 1.0));
            assert!(
                math::abs(var - var_expect) < 3.0 * se,
                "quadrature {quad}: var {var}, band {se}"
            );
        }
    }

    #[test]
    fn constant_phase_is_a_pure_rotation_statistically() {
        // Derotating a constant-offset run must match the phase-free channel
        // in distribution; two-sample Kolmogorov-Smirnov at the 5% level.
        let n = 10_000usize;
        let x = unit_frame(n, 3);
        let mut plain_cfg = ChannelConfig::with_snr(3.0, 1000);
        let (plain, _) = transmit(&x, &plain_cfg).unwrap();
        plain_cfg.noise_seed = 2000;
        plain_cfg.phase_model = PhaseModel::Constant(core::f64::consts::FRAC_PI_4);
        let (offset, _) = transmit(&x, &plain_cfg).unwrap();
        let rot = C64::new(
            math::cos(core::f64::consts::FRAC_PI_4),
            -math::sin(core::f64::consts::FRAC_PI_4),
        );
        for quad in 0..2 {
            let mut a: Vec<f64> = plain
                .iter()
                .zip(&x)
                .map(|(z, s)| {
                    let d = z - s;
                    if quad == 0 { d.re } else { d.im }
                })
                .collect();
            let mut b: Vec<f64> = offset
                .iter()
                .zip(&x)
                .map(|(z, s)| {
                    let d = z * rot - s;
                    if quad == 0 { d.re } else { d.im }
                })
                .collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            let mut stat: f64 = 0.0;
            let (mut i, mut j) = (0usize, 0usize);
            while i < a.len() && j < b.len() {
                if a[i] <= b[j] {
                    i += 1;
                } else {
                    j += 1;
                }
                let gap = math::abs(i as f64 / a.len() as f64 - j as f64 / b.len() as f64);
                stat = stat.max(gap);
            }
            let threshold = 1.358 * math::sqrt(2.0 / n as f64);
            assert!(stat < threshold, "quadrature {quad}: KS {stat} vs {threshold}");
        }
    }

    #[test]
    fn random_walk_starts_at_zero_and_moves() {
        let x = unit_frame(512, 5);
        let mut cfg = ChannelConfig::with_snr(10.0, 31);
        cfg.phase_model = PhaseModel::RandomWalk { step_stddev: 0.01 };
        let (_, track) = transmit(&x, &cfg).unwrap();
        assert_eq!(track.phases[0], 0.0);
        assert!(track.phases.iter().any(|&p| p != 0.0));
        for w in track.phases.windows(2) {
            assert!(math::abs(w[1] - w[0]) < 0.1);
        }
    }

    #[test]
    fn effective_snr_examples() {
        assert!((effective_snr(3.0, 1.0, 0.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((effective_snr(4.0, 0.5, 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((effective_snr(6.0, 0.5, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(effective_snr(0.0, 0.5, 0.0).is_err());
        assert!(effective_snr(1.0, 0.0, 0.0).is_err());
        assert!(effective_snr(1.0, 1.1, 0.0).is_err());
    }

    #[test]
    fn attenuation_examples() {
        assert!((attenuation_to_transmission(0.2, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((attenuation_to_transmission(0.2, 50.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(attenuation_to_transmission(-0.1, 1.0).is_err());
        assert!(attenuation_to_transmission(0.2, -1.0).is_err());
        let g1 = attenuation_to_transmission(0.2, 12.5).unwrap();
        let g2 = attenuation_to_transmission(0.2, 17.5).unwrap();
        let joint = attenuation_to_transmission(0.2, 30.0).unwrap();
        assert!(math::abs(joint - g1 * g2) < 1e-12);
        let mut prev = 1.0;
        for l in 1..=40 {
            let g = attenuation_to_transmission(0.2, l as f64).unwrap();
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn attack_bookkeeping() {
        let clean = ChannelConfig::with_snr(2.0, 0);
        let out = apply_attack(&clean).unwrap();
        assert_eq!(out, clean);

        let mut tapped = ChannelConfig::with_snr(2.0, 0);
        tapped.transmission = 0.7;
        tapped.attack = Attack::BeamSplitter;
        let out = apply_attack(&tapped).unwrap();
        let tap = out.eve_tap.unwrap();
        assert!((tap.transmission - 0.3).abs() < 1e-15);

        let mut contradictory = tapped.clone();
        contradictory.excess_noise = 0.1;
        assert!(apply_attack(&contradictory).is_err());

        let mut cloner = ChannelConfig::with_snr(2.0, 0);
        cloner.transmission = 0.8;
        cloner.excess_noise = 0.1;
        cloner.attack = Attack::EntanglingCloner;
        let out = apply_attack(&cloner).unwrap();
        assert_eq!(out.snr, cloner.snr);
        assert_eq!(out.transmission, cloner.transmission);
        assert!((out.eve_tap.unwrap().transmission - 0.2).abs() < 1e-15);
    }

    #[test]
    fn attack_never_touches_symbols() {
        let x = unit_frame(128, 8);
        let mut cfg = ChannelConfig::with_snr(2.0, 55);
        cfg.transmission = 0.6;
        let (y_plain, _) = transmit(&x, &cfg).unwrap();
        cfg.attack = Attack::BeamSplitter;
        let attacked = apply_attack(&cfg).unwrap();
        let (y_attacked, _) = transmit(&x, &attacked).unwrap();
        assert_eq!(y_plain, y_attacked);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = ChannelConfig::with_snr(2.0, 0);
        cfg.transmission = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ChannelConfig::with_snr(2.0, 0);
        cfg.excess_noise = -0.1;
        assert!(cfg.validate().is_err());
        assert!(ChannelConfig::with_snr(0.0, 0).validate().is_err());
        assert!(ChannelConfig::with_snr(-2.0, 0).validate().is_err());
        let mut cfg = ChannelConfig::with_snr(2.0, 0);
        cfg.phase_model = PhaseModel::RandomWalk { step_stddev: -1.0 };
        assert!(cfg.validate().is_err());
        let empty: [C64; 0] = [];
        assert!(transmit(&empty, &ChannelConfig::with_snr(2.0, 0)).is_err());
        let off = [C64::new(0.5, 0.0)];
        assert!(transmit(&off, &ChannelConfig::with_snr(2.0, 0)).is_err());
    }
}
