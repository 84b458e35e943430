//! Flat `key = value` run configuration.
//!
//! A config file may supply any CLI flag under its long name; flags given on
//! the command line always win. Unknown keys are errors so typos cannot
//! silently fall back to defaults.
//!
//! ```
//! use cvqkd_sim::config::FileConfig;
//!
//! let cfg = FileConfig::parse_str("seed = 7\n# comment\nva = 12.5\n").unwrap();
//! assert_eq!(cfg.get::<u64>("seed").unwrap(), Some(7));
//! assert_eq!(cfg.get::<f64>("va").unwrap(), Some(12.5));
//! assert_eq!(cfg.get::<u64>("k").unwrap(), None);
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use cvqkd_core::channel::{Attack, PhaseModel};
use cvqkd_core::protocol::TimingMode;

/// Every key a config file may carry; mirrors the CLI flag names.
pub const KNOWN_KEYS: &[&str] = &[
    "seed",
    "k",
    "frames",
    "snr-db",
    "distance-km",
    "alpha-db-per-km",
    "va",
    "zeta",
    "attack",
    "iters",
    "out",
    "format",
    "workers",
    "timing",
    "min-bits",
    "baseline",
    "noiseless",
    "n-states",
    "disclosed-fraction",
    "phase-model",
    "phase-offset",
    "phase-step",
];

/// Parsed config file: raw string values by key.
#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    /// No file given; every lookup yields `None`.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse_str(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// skipped, keys must be known and unique.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`, got {raw:?}", lineno + 1);
            };
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                bail!("line {}: unknown key {key:?}", lineno + 1);
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                bail!("line {}: duplicate key {key:?}", lineno + 1);
            }
        }
        Ok(Self { values })
    }

    /// Typed lookup; `None` when the file does not set the key.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        debug_assert!(KNOWN_KEYS.contains(&key), "lookup of unknown key {key}");
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse() {
                Ok(v) => Ok(Some(v)),
                Err(e) => bail!("key {key:?}: cannot parse {raw:?}: {e}"),
            },
        }
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get::<bool>(key)
    }
}

// ---------------------------------------------------------------------------
// Axis point lists
// ---------------------------------------------------------------------------

/// Parses `a,b,c` lists, `lo:hi` ranges at `default_step`, `lo:step:hi`
/// ranges, or a single number.
pub fn parse_points(spec: &str, default_step: f64) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        bail!("empty point list");
    }
    if spec.contains(',') {
        return spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .with_context(|| format!("point {s:?}"))
            })
            .collect();
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let (lo, step, hi) = match parts.as_slice() {
            [lo, hi] => (lo, default_step, hi),
            [lo, step, hi] => {
                let step: f64 = step
                    .trim()
                    .parse()
                    .with_context(|| format!("range step {step:?}"))?;
                (lo, step, hi)
            }
            _ => bail!("expected lo:hi or lo:step:hi, got {spec:?}"),
        };
        let lo: f64 = lo.trim().parse().with_context(|| format!("range start {lo:?}"))?;
        let hi: f64 = hi.trim().parse().with_context(|| format!("range end {hi:?}"))?;
        if !(step > 0.0) {
            bail!("range step must be positive, got {step}");
        }
        if hi < lo {
            bail!("range end {hi} below start {lo}");
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| lo + i as f64 * step).collect());
    }
    Ok(vec![spec.parse().with_context(|| format!("point {spec:?}"))?])
}

// ---------------------------------------------------------------------------
// Enumerated flag values
// ---------------------------------------------------------------------------

pub fn parse_attack(name: &str) -> Result<Attack> {
    match name {
        "none" => Ok(Attack::None),
        "beam-splitter" => Ok(Attack::BeamSplitter),
        "entangling-cloner" => Ok(Attack::EntanglingCloner),
        other => bail!("unknown attack {other:?} (none, beam-splitter, entangling-cloner)"),
    }
}

pub fn parse_timing(name: &str) -> Result<TimingMode> {
    match name {
        "wall" => Ok(TimingMode::Wall),
        "off" => Ok(TimingMode::Off),
        other => bail!("unknown timing mode {other:?} (wall, off)"),
    }
}

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Structured,
}

pub fn parse_format(name: &str) -> Result<OutputFormat> {
    match name {
        "csv" => Ok(OutputFormat::Csv),
        "structured" => Ok(OutputFormat::Structured),
        other => bail!("unknown format {other:?} (csv, structured)"),
    }
}

/// Builds the channel phase disturbance from its flag triple.
pub fn parse_phase_model(
    name: &str,
    offset: Option<f64>,
    step: Option<f64>,
) -> Result<PhaseModel> {
    match name {
        "none" => Ok(PhaseModel::None),
        "constant" => Ok(PhaseModel::Constant(offset.unwrap_or(0.0))),
        "random-walk" => Ok(PhaseModel::RandomWalk {
            step_stddev: step.unwrap_or(0.01),
        }),
        other => bail!("unknown phase model {other:?} (none, constant, random-walk)"),
    }
}
