//! `cvqkd`: sessions, sweeps, and baselines from the command line.
//!
//! Every run is reproducible from its seed; see the subcommand help for
//! flags. Exit codes: 0 success, 2 invalid configuration, 3 I/O failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cvqkd_core::channel::{Attack, ChannelConfig, PhaseModel};
use cvqkd_core::codec::CodecConfig;
use cvqkd_core::infotheory::mutual_info_ab;
use cvqkd_core::protocol::{run_session, SessionConfig, TimingMode};
use cvqkd_core::rng::mix;
use cvqkd_sim::baseline::uncoded_dpsk_baseline;
use cvqkd_sim::config::{
    parse_attack, parse_format, parse_phase_model, parse_points, parse_timing, FileConfig,
    OutputFormat,
};
use cvqkd_sim::report::{CsvSink, JsonSink, RowSink, SweepRow};
use cvqkd_sim::sweep::{run_distance_sweep, run_snr_sweep, SweepAxis, SweepConfig};

#[derive(Parser)]
#[command(name = "cvqkd", version, about = "Deterministic CV-QKD reconciliation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one full session at a fixed SNR and emit a single row.
    Session(CommonOpts),
    /// Sweep the channel SNR in dB (default grid 0:0.25:6).
    SweepSnr(CommonOpts),
    /// Sweep the fiber length in km (default grid 0:5:40).
    SweepDistance(CommonOpts),
    /// Uncoded differential-detection error rate at a fixed SNR.
    Baseline(CommonOpts),
}

/// Flags shared by all subcommands. A config file may supply any of them
/// under the flag's long name; explicit flags win.
#[derive(Args)]
struct CommonOpts {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; every random stream derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Key bits per frame (even, at least 2).
    #[arg(long)]
    k: Option<usize>,
    /// Frames per session (per sweep point, before the bit floor).
    #[arg(long)]
    frames: Option<usize>,
    /// SNR in dB: single value, `a,b,c` list, or `lo[:step]:hi` range.
    #[arg(long)]
    snr_db: Option<String>,
    /// Distance in km: single value, list, or range.
    #[arg(long)]
    distance_km: Option<String>,
    /// Fiber attenuation in dB/km.
    #[arg(long)]
    alpha_db_per_km: Option<f64>,
    /// Modulation variance in shot-noise units.
    #[arg(long)]
    va: Option<f64>,
    /// Excess noise in shot-noise units.
    #[arg(long)]
    zeta: Option<f64>,
    /// Listener model: none, beam-splitter, entangling-cloner.
    #[arg(long)]
    attack: Option<String>,
    /// Decoder iteration cap.
    #[arg(long)]
    iters: Option<usize>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or structured.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Timing column: wall or off (off keeps output byte-stable).
    #[arg(long)]
    timing: Option<String>,
    /// Minimum key bits per point (baseline: sample size).
    #[arg(long)]
    min_bits: Option<u64>,
    /// Also run the uncoded reference.
    #[arg(long)]
    baseline: bool,
    /// Force a noise-free channel.
    #[arg(long)]
    noiseless: bool,
    /// Coherent states in the Gaussian phase.
    #[arg(long)]
    n_states: Option<usize>,
    /// Fraction of sifted data disclosed for estimation.
    #[arg(long)]
    disclosed_fraction: Option<f64>,
    /// Carrier phase model: none, constant, random-walk.
    #[arg(long)]
    phase_model: Option<String>,
    /// Offset in radians for the constant phase model.
    #[arg(long)]
    phase_offset: Option<f64>,
    /// Step deviation in radians for the random-walk phase model.
    #[arg(long)]
    phase_step: Option<f64>,
}

// ---------------------------------------------------------------------------
// Flag / file / default resolution
// ---------------------------------------------------------------------------

/// Fully resolved options: CLI flag, else config file, else default.
struct Resolved {
    seed: u64,
    k: usize,
    frames: usize,
    snr_db: Option<String>,
    distance_km: Option<String>,
    alpha_db_per_km: f64,
    va: f64,
    zeta: f64,
    attack: Attack,
    iters: usize,
    out: Option<PathBuf>,
    format: OutputFormat,
    workers: usize,
    timing: TimingMode,
    min_bits: u64,
    baseline: bool,
    noiseless: bool,
    n_states: usize,
    disclosed_fraction: f64,
    phase_model: PhaseModel,
}

impl Resolved {
    fn from(opts: &CommonOpts) -> Result<Self> {
        let file = match &opts.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::empty(),
        };
        macro_rules! pick {
            ($flag:expr, $key:literal, $default:expr) => {
                match &$flag {
                    Some(v) => v.clone(),
                    None => file.get($key)?.unwrap_or($default),
                }
            };
        }
        let phase_name = pick!(opts.phase_model, "phase-model", "none".to_string());
        let phase_offset = match opts.phase_offset {
            Some(v) => Some(v),
            None => file.get("phase-offset")?,
        };
        let phase_step = match opts.phase_step {
            Some(v) => Some(v),
            None => file.get("phase-step")?,
        };
        Ok(Self {
            seed: pick!(opts.seed, "seed", 1),
            k: pick!(opts.k, "k", 4096),
            frames: pick!(opts.frames, "frames", 1),
            snr_db: match &opts.snr_db {
                Some(v) => Some(v.clone()),
                None => file.get("snr-db")?,
            },
            distance_km: match &opts.distance_km {
                Some(v) => Some(v.clone()),
                None => file.get("distance-km")?,
            },
            alpha_db_per_km: pick!(opts.alpha_db_per_km, "alpha-db-per-km", 0.2),
            va: pick!(opts.va, "va", 20.0),
            zeta: pick!(opts.zeta, "zeta", 0.0),
            attack: parse_attack(&pick!(opts.attack, "attack", "none".to_string()))?,
            iters: pick!(opts.iters, "iters", 10),
            out: match &opts.out {
                Some(v) => Some(v.clone()),
                None => file.get::<PathBuf>("out")?,
            },
            format: parse_format(&pick!(opts.format, "format", "csv".to_string()))?,
            workers: pick!(opts.workers, "workers", 0),
            timing: parse_timing(&pick!(opts.timing, "timing", "wall".to_string()))?,
            min_bits: pick!(opts.min_bits, "min-bits", 100_000),
            baseline: opts.baseline || file.get_bool("baseline")?.unwrap_or(false),
            noiseless: opts.noiseless || file.get_bool("noiseless")?.unwrap_or(false),
            n_states: pick!(opts.n_states, "n-states", 20_000),
            disclosed_fraction: pick!(opts.disclosed_fraction, "disclosed-fraction", 0.1),
            phase_model: parse_phase_model(&phase_name, phase_offset, phase_step)?,
        })
    }

    /// Session template with everything but SNR, transmission, and frame
    /// count, which the subcommands fill in.
    fn session_template(&self) -> SessionConfig {
        let mut codec = CodecConfig::new(self.k, mix(self.seed ^ 0x494c_5645));
        codec.max_iterations = self.iters;
        let mut channel = ChannelConfig::with_snr(1.0, 0);
        channel.excess_noise = self.zeta;
        channel.attack = self.attack;
        channel.phase_model = self.phase_model.clone();
        SessionConfig {
            n_states: self.n_states,
            modulation_variance: self.va,
            disclosed_fraction: self.disclosed_fraction,
            frames: self.frames,
            codec,
            channel,
            master_seed: self.seed,
            timing: self.timing,
        }
    }

    fn single_snr_db(&self) -> Result<f64> {
        let Some(spec) = &self.snr_db else {
            bail!("--snr-db is required for this subcommand");
        };
        let points = parse_points(spec, 0.25)?;
        if points.len() != 1 {
            bail!("expected a single SNR value, got {} points", points.len());
        }
        Ok(points[0])
    }

    fn sweep_config(&self, axis: SweepAxis) -> Result<SweepConfig> {
        let (spec, default_grid, step) = match axis {
            SweepAxis::SnrDb => (&self.snr_db, "0:6", 0.25),
            SweepAxis::DistanceKm => (&self.distance_km, "0:40", 5.0),
        };
        let points = parse_points(spec.as_deref().unwrap_or(default_grid), step)?;
        let mut cfg = SweepConfig::new(axis, points, self.seed);
        cfg.frames_per_point = self.frames;
        cfg.min_bits_per_point = self.min_bits;
        cfg.baseline = self.baseline;
        cfg.noiseless = self.noiseless;
        cfg.alpha_db_per_km = self.alpha_db_per_km;
        cfg.session = self.session_template();
        cfg.workers = self.workers;
        Ok(cfg)
    }
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

/// CSV or JSON sink over a writer chosen at runtime.
enum AnySink<W: Write> {
    Csv(CsvSink<W>),
    Json(JsonSink<W>),
}

impl<W: Write> AnySink<W> {
    fn new(format: OutputFormat, writer: W) -> Result<Self> {
        Ok(match format {
            OutputFormat::Csv => Self::Csv(CsvSink::new(writer)?),
            OutputFormat::Structured => Self::Json(JsonSink::new(writer)?),
        })
    }
}

impl<W: Write> RowSink for AnySink<W> {
    fn accept(&mut self, row: &SweepRow) -> Result<()> {
        match self {
            Self::Csv(s) => s.accept(row),
            Self::Json(s) => s.accept(row),
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self {
            Self::Csv(s) => s.finish(),
            Self::Json(s) => s.finish(),
        }
    }
}

/// Opens the output sink up front so path problems surface before any
/// simulation work starts.
fn open_sink(resolved: &Resolved) -> Result<AnySink<Box<dyn Write + Send>>> {
    let writer: Box<dyn Write + Send> = match &resolved.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).with_context(|| {
            format!("creating output file {}", path.display())
        })?)),
        None => Box::new(std::io::stdout()),
    };
    AnySink::new(resolved.format, writer)
}

fn emit_single(resolved: &Resolved, row: &SweepRow) -> Result<()> {
    let mut sink = open_sink(resolved)?;
    sink.accept(row)?;
    sink.finish()
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_session(resolved: &Resolved) -> Result<()> {
    let snr_db = resolved.single_snr_db()?;
    let mut session = resolved.session_template();
    session.channel.snr = if resolved.noiseless {
        f64::INFINITY
    } else {
        10f64.powf(snr_db / 10.0)
    };
    let report = run_session(&session)?;
    let qber_baseline = if resolved.baseline {
        Some(uncoded_dpsk_baseline(
            session.channel.snr,
            report.bits as usize,
            session.master_seed,
        )?)
    } else {
        None
    };
    let row = SweepRow {
        axis_value: snr_db,
        qber: report.qber,
        qber_baseline,
        i_ab: report.i_ab,
        i_ae: report.i_ae,
        i_s: report.i_s,
        frames: report.frames as u64,
        bits: report.bits,
        mean_iterations: report.iterations_mean,
        seconds: report.wall_time_seconds,
    };
    emit_single(resolved, &row)
}

fn cmd_baseline(resolved: &Resolved) -> Result<()> {
    let snr_db = resolved.single_snr_db()?;
    let snr = if resolved.noiseless {
        f64::INFINITY
    } else {
        10f64.powf(snr_db / 10.0)
    };
    let n_bits = resolved.min_bits.max(1000) as usize;
    let start = std::time::Instant::now();
    let qber = uncoded_dpsk_baseline(snr, n_bits, resolved.seed)?;
    let i_ab = mutual_info_ab(snr)?;
    let row = SweepRow {
        axis_value: snr_db,
        qber,
        qber_baseline: None,
        i_ab,
        i_ae: 0.0,
        i_s: i_ab,
        frames: 0,
        bits: n_bits as u64,
        mean_iterations: 0.0,
        seconds: match resolved.timing {
            TimingMode::Wall => start.elapsed().as_secs_f64(),
            TimingMode::Off => 0.0,
        },
    };
    emit_single(resolved, &row)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Session(opts) => cmd_session(&Resolved::from(opts)?),
        Command::Baseline(opts) => cmd_baseline(&Resolved::from(opts)?),
        Command::SweepSnr(opts) => {
            let resolved = Resolved::from(opts)?;
            let cfg = resolved.sweep_config(SweepAxis::SnrDb)?;
            let mut sink = open_sink(&resolved)?;
            run_snr_sweep(&cfg, &mut sink).map(|_| ())
        }
        Command::SweepDistance(opts) => {
            let resolved = Resolved::from(opts)?;
            let cfg = resolved.sweep_config(SweepAxis::DistanceKm)?;
            let mut sink = open_sink(&resolved)?;
            run_distance_sweep(&cfg, &mut sink).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let io_failure = err.chain().any(|cause| cause.is::<std::io::Error>());
            ExitCode::from(if io_failure { 3 } else { 2 })
        }
    }
}
