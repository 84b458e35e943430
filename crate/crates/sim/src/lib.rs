//! Monte Carlo experiment driver for the turbo-DPSK reconciliation stack.
//!
//! The library side of the `cvqkd` binary: seeded SNR and distance sweeps,
//! the uncoded differential-detection baseline, and the CSV/JSON row formats.
//! Everything is deterministic in its seeds; worker count never changes
//! output bytes.

pub mod baseline;
pub mod config;
pub mod report;
pub mod sweep;
