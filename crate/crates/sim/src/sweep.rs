//! Monte Carlo sweeps over SNR or fiber length.
//!
//! Each sweep point runs a full session (Gaussian phase, estimation, coded
//! frames) at a sub-seed derived from the master seed and the point index
//! alone, so results are identical for any worker count and rows always
//! arrive at the sink in point order.
//!
//! ```no_run
//! use cvqkd_sim::report::CollectSink;
//! use cvqkd_sim::sweep::{run_snr_sweep, SweepAxis, SweepConfig};
//!
//! let mut cfg = SweepConfig::new(SweepAxis::SnrDb, vec![0.0, 3.0, 6.0], 42);
//! cfg.min_bits_per_point = 10_000;
//! let mut sink = CollectSink::default();
//! let rows = run_snr_sweep(&cfg, &mut sink).unwrap();
//! assert_eq!(rows.len(), 3);
//! ```

use std::collections::BTreeMap;
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use cvqkd_core::channel::{attenuation_to_transmission, effective_snr};
use cvqkd_core::protocol::{run_session, SessionConfig};
use cvqkd_core::rng::mix;
use rayon::prelude::*;

use crate::baseline::uncoded_dpsk_baseline;
use crate::report::{RowSink, SweepRow};

/// Quantity varied across the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Channel SNR in dB; transmission and excess noise stay fixed and the
    /// modulation variance is chosen to realize each point.
    SnrDb,
    /// Fiber length in km; the modulation variance stays fixed and the
    /// transmission follows the attenuation law.
    DistanceKm,
}

/// Parameters of one sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    /// Axis positions, strictly increasing.
    pub points: Vec<f64>,
    /// Lower bound on frames per point; raised when `min_bits_per_point`
    /// needs more.
    pub frames_per_point: usize,
    /// Every row carries at least this many key bits.
    pub min_bits_per_point: u64,
    /// Also run the uncoded reference at each point.
    pub baseline: bool,
    /// Force a noise-free channel at every point.
    pub noiseless: bool,
    /// Fiber attenuation for the distance axis, dB/km.
    pub alpha_db_per_km: f64,
    /// Template for each point's session; seed, SNR, transmission and frame
    /// count are overridden per point.
    pub session: SessionConfig,
    pub master_seed: u64,
    /// Worker threads; 0 picks the runtime default.
    pub workers: usize,
}

impl SweepConfig {
    /// Sweep with the stock session template: k = 4096, modulation variance
    /// 20, clean channel, no attack.
    pub fn new(axis: SweepAxis, points: Vec<f64>, master_seed: u64) -> Self {
        let mut session = SessionConfig::with_snr(20.0, 4096, 1, master_seed);
        session.modulation_variance = 20.0;
        Self {
            axis,
            points,
            frames_per_point: 1,
            min_bits_per_point: 100_000,
            baseline: false,
            noiseless: false,
            alpha_db_per_km: 0.2,
            session,
            master_seed,
            workers: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            bail!("sweep needs at least one point");
        }
        if !self.points.windows(2).all(|w| w[0] < w[1]) {
            bail!("sweep points must be strictly increasing");
        }
        if self.frames_per_point == 0 {
            bail!("frames per point must be at least 1");
        }
        if self.axis == SweepAxis::DistanceKm {
            if !(self.alpha_db_per_km > 0.0) || !self.alpha_db_per_km.is_finite() {
                bail!("attenuation must be positive, got {}", self.alpha_db_per_km);
            }
            if self.points[0] < 0.0 {
                bail!("distances must be nonnegative");
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Point execution
// ---------------------------------------------------------------------------

/// Session for point `idx` at axis position `value`, plus its linear SNR.
fn point_session(cfg: &SweepConfig, idx: usize, value: f64) -> Result<(SessionConfig, f64)> {
    let mut session = cfg.session.clone();
    session.master_seed = mix(cfg.master_seed ^ idx as u64);
    let snr = match cfg.axis {
        SweepAxis::SnrDb => {
            let snr = 10f64.powf(value / 10.0);
            let g = session.channel.transmission;
            let zeta = session.channel.excess_noise;
            session.modulation_variance = snr * (1.0 + g * zeta) / g;
            snr
        }
        SweepAxis::DistanceKm => {
            let g = attenuation_to_transmission(cfg.alpha_db_per_km, value)?;
            session.channel.transmission = g;
            effective_snr(session.modulation_variance, g, session.channel.excess_noise)?
        }
    };
    let snr = if cfg.noiseless { f64::INFINITY } else { snr };
    session.channel.snr = snr;
    let by_bits = (cfg.min_bits_per_point as usize).div_ceil(session.codec.k);
    session.frames = cfg.frames_per_point.max(by_bits);
    session.validate()?;
    Ok((session, snr))
}

fn run_point(cfg: &SweepConfig, idx: usize, value: f64) -> Result<SweepRow> {
    let (session, snr) = point_session(cfg, idx, value)?;
    let report = run_session(&session)
        .with_context(|| format!("point {idx} at axis value {value}"))?;
    let qber_baseline = if cfg.baseline {
        Some(uncoded_dpsk_baseline(
            snr,
            report.bits as usize,
            session.master_seed,
        )?)
    } else {
        None
    };
    Ok(SweepRow {
        axis_value: value,
        qber: report.qber,
        qber_baseline,
        i_ab: report.i_ab,
        i_ae: report.i_ae,
        i_s: report.i_s,
        frames: report.frames as u64,
        bits: report.bits,
        mean_iterations: report.iterations_mean,
        seconds: report.wall_time_seconds,
    })
}

// ---------------------------------------------------------------------------
// Ordered parallel execution
// ---------------------------------------------------------------------------

struct Emitter<'a, S: RowSink> {
    next: usize,
    pending: BTreeMap<usize, SweepRow>,
    emitted: Vec<SweepRow>,
    sink: &'a mut S,
}

impl<S: RowSink> Emitter<'_, S> {
    fn push(&mut self, idx: usize, row: SweepRow) -> Result<()> {
        self.pending.insert(idx, row);
        while let Some(row) = self.pending.remove(&self.next) {
            self.sink.accept(&row)?;
            self.emitted.push(row);
            self.next += 1;
        }
        Ok(())
    }
}

fn run_sweep<S: RowSink + Send>(cfg: &SweepConfig, sink: &mut S) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .context("building worker pool")?;
    let emitter = Mutex::new(Emitter {
        next: 0,
        pending: BTreeMap::new(),
        emitted: Vec::with_capacity(cfg.points.len()),
        sink,
    });
    pool.install(|| {
        cfg.points
            .par_iter()
            .enumerate()
            .try_for_each(|(idx, &value)| {
                let row = run_point(cfg, idx, value)?;
                emitter.lock().unwrap().push(idx, row)
            })
    })?;
    let emitter = emitter.into_inner().unwrap();
    debug_assert_eq!(emitter.emitted.len(), cfg.points.len());
    emitter.sink.finish()?;
    Ok(emitter.emitted)
}

/// Runs a sweep over SNR points given in dB.
pub fn run_snr_sweep<S: RowSink + Send>(cfg: &SweepConfig, sink: &mut S) -> Result<Vec<SweepRow>> {
    if cfg.axis != SweepAxis::SnrDb {
        bail!("config axis is not snr_db");
    }
    run_sweep(cfg, sink)
}

/// Runs a sweep over fiber lengths given in km.
pub fn run_distance_sweep<S: RowSink + Send>(
    cfg: &SweepConfig,
    sink: &mut S,
) -> Result<Vec<SweepRow>> {
    if cfg.axis != SweepAxis::DistanceKm {
        bail!("config axis is not distance_km");
    }
    run_sweep(cfg, sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{parse_csv, CollectSink, CsvSink};
    use cvqkd_core::protocol::TimingMode;

    fn small(axis: SweepAxis, points: Vec<f64>, seed: u64) -> SweepConfig {
        let mut cfg = SweepConfig::new(axis, points, seed);
        cfg.session.codec = cvqkd_core::codec::CodecConfig::new(512, 0xC0DE);
        cfg.session.n_states = 2000;
        cfg.session.timing = TimingMode::Off;
        cfg.min_bits_per_point = 4096;
        cfg
    }

    #[test]
    fn noiseless_single_point_has_zero_qber() {
        let mut cfg = small(SweepAxis::SnrDb, vec![0.0], 1);
        cfg.noiseless = true;
        let mut sink = CollectSink::default();
        let rows = run_snr_sweep(&cfg, &mut sink).unwrap();
        assert_eq!(rows[0].qber, 0.0);
        assert_eq!(rows[0].bits, 4096);
        assert_eq!(sink.rows, rows);
    }

    #[test]
    fn worker_count_does_not_change_bytes() {
        let mut bytes = Vec::new();
        for workers in [1usize, 4] {
            let mut cfg = small(SweepAxis::SnrDb, vec![4.0, 6.0, 8.0], 7);
            cfg.workers = workers;
            cfg.baseline = true;
            let mut buf = Vec::new();
            run_snr_sweep(&cfg, &mut CsvSink::new(&mut buf).unwrap()).unwrap();
            bytes.push(buf);
        }
        assert_eq!(bytes[0], bytes[1]);
        assert!(!parse_csv(&bytes[0][..]).unwrap().is_empty());
    }

    #[test]
    fn distance_zero_matches_the_equivalent_snr_point() {
        let seed = 123;
        let dist = small(SweepAxis::DistanceKm, vec![0.0], seed);
        // Template: V_A = 20, G = 1, zeta = 0, so L = 0 runs at linear SNR 20.
        let snr_db = 10.0 * 20f64.log10();
        let snr = small(SweepAxis::SnrDb, vec![snr_db], seed);
        let d = run_distance_sweep(&dist, &mut CollectSink::default()).unwrap();
        let s = run_snr_sweep(&snr, &mut CollectSink::default()).unwrap();
        let (mut d0, mut s0) = (d[0].clone(), s[0].clone());
        d0.axis_value = 0.0;
        s0.axis_value = 0.0;
        assert_eq!(d0, s0);
    }

    #[test]
    fn coded_curve_beats_the_baseline() {
        let mut cfg = small(SweepAxis::SnrDb, vec![2.0, 6.0, 10.0], 5);
        cfg.baseline = true;
        cfg.min_bits_per_point = 20_000;
        let rows = run_snr_sweep(&cfg, &mut CollectSink::default()).unwrap();
        for row in &rows {
            let base = row.qber_baseline.unwrap();
            let n = row.bits as f64;
            let sigma = (base.max(1e-9) * (1.0 - base) / n).sqrt();
            assert!(
                row.qber <= base + 2.0 * sigma,
                "axis {}: coded {} vs baseline {base}",
                row.axis_value,
                row.qber
            );
        }
    }

    #[test]
    fn bad_configs_are_rejected_before_running() {
        let cfg = small(SweepAxis::SnrDb, vec![], 0);
        assert!(run_snr_sweep(&cfg, &mut CollectSink::default()).is_err());
        let cfg = small(SweepAxis::SnrDb, vec![3.0, 3.0], 0);
        assert!(run_snr_sweep(&cfg, &mut CollectSink::default()).is_err());
        let cfg = small(SweepAxis::SnrDb, vec![1.0], 0);
        assert!(run_distance_sweep(&cfg, &mut CollectSink::default()).is_err());
        let mut cfg = small(SweepAxis::DistanceKm, vec![10.0], 0);
        cfg.alpha_db_per_km = 0.0;
        assert!(run_distance_sweep(&cfg, &mut CollectSink::default()).is_err());
    }
}
