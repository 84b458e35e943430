//! Sweep result rows and their file formats.
//!
//! One [`SweepRow`] summarizes one operating point. Rows serialize to a
//! fixed-header CSV (floats at 10 significant digits) or to a structured JSON
//! array with the same fields, and both forms parse back.
//!
//! ```
//! use cvqkd_sim::report::{emit_csv, parse_csv, SweepRow};
//!
//! let rows = vec![SweepRow {
//!     axis_value: 3.0,
//!     qber: 0.015625,
//!     qber_baseline: None,
//!     i_ab: 1.0,
//!     i_ae: 0.25,
//!     i_s: 0.75,
//!     frames: 25,
//!     bits: 102400,
//!     mean_iterations: 4.2,
//!     seconds: 0.0,
//! }];
//! let mut buf = Vec::new();
//! emit_csv(&rows, &mut buf).unwrap();
//! assert_eq!(parse_csv(&buf[..]).unwrap(), rows);
//! ```

use std::io::{BufRead, BufReader, Read, Write};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Column order of the CSV format; the header line is exactly this.
pub const CSV_HEADER: &str = "axis,qber,qber_baseline,i_ab,i_ae,i_s,frames,bits,mean_iterations,seconds";

/// One operating point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Position on the sweep axis (dB or km).
    pub axis_value: f64,
    /// Reconciled bit error rate at this point.
    pub qber: f64,
    /// Uncoded differential-detection error rate, when the baseline ran.
    pub qber_baseline: Option<f64>,
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_s: f64,
    /// Key frames behind `qber`.
    pub frames: u64,
    /// Key bits behind `qber`.
    pub bits: u64,
    pub mean_iterations: f64,
    /// Wall time for the point (zero when timing is off).
    pub seconds: f64,
}

/// Floats are written with 10 significant digits.
fn fmt_float(x: f64) -> String {
    format!("{x:.9e}")
}

fn csv_line(row: &SweepRow) -> String {
    let baseline = row.qber_baseline.map(fmt_float).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        fmt_float(row.axis_value),
        fmt_float(row.qber),
        baseline,
        fmt_float(row.i_ab),
        fmt_float(row.i_ae),
        fmt_float(row.i_s),
        row.frames,
        row.bits,
        fmt_float(row.mean_iterations),
        fmt_float(row.seconds),
    )
}

// ---------------------------------------------------------------------------
// Incremental sinks
// ---------------------------------------------------------------------------

/// Destination for rows as a sweep produces them.
pub trait RowSink {
    fn accept(&mut self, row: &SweepRow) -> Result<()>;
    /// Called once after the last row.
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

/// Streams CSV; the header is written up front so an unwritable sink fails
/// before any simulation work starts.
pub struct CsvSink<W: Write> {
    writer: W,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut writer: W) -> Result<Self> {
        writeln!(writer, "{CSV_HEADER}").context("writing CSV header")?;
        Ok(Self { writer })
    }
}

impl<W: Write> RowSink for CsvSink<W> {
    fn accept(&mut self, row: &SweepRow) -> Result<()> {
        writeln!(self.writer, "{}", csv_line(row)).context("writing CSV row")
    }

    fn finish(&mut self) -> Result<()> {
        self.writer.flush().context("flushing CSV output")
    }
}

/// Streams a JSON array, one object per line.
pub struct JsonSink<W: Write> {
    writer: W,
    rows_written: usize,
}

impl<W: Write> JsonSink<W> {
    pub fn new(mut writer: W) -> Result<Self> {
        write!(writer, "[").context("writing JSON opening")?;
        Ok(Self { writer, rows_written: 0 })
    }
}

impl<W: Write> RowSink for JsonSink<W> {
    fn accept(&mut self, row: &SweepRow) -> Result<()> {
        let sep = if self.rows_written == 0 { "\n" } else { ",\n" };
        let body = serde_json::to_string(row).context("encoding row")?;
        write!(self.writer, "{sep}  {body}").context("writing JSON row")?;
        self.rows_written += 1;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        writeln!(self.writer, "\n]").context("writing JSON closing")?;
        self.writer.flush().context("flushing JSON output")
    }
}

/// Keeps rows in memory; for tests and callers that post-process.
#[derive(Default)]
pub struct CollectSink {
    pub rows: Vec<SweepRow>,
}

impl RowSink for CollectSink {
    fn accept(&mut self, row: &SweepRow) -> Result<()> {
        self.rows.push(row.clone());
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// One-shot emission and parsing
// ---------------------------------------------------------------------------

/// Writes all rows as CSV.
pub fn emit_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut sink = CsvSink::new(writer)?;
    for row in rows {
        sink.accept(row)?;
    }
    sink.finish()
}

/// Writes all rows as a JSON array.
pub fn emit_json<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut sink = JsonSink::new(writer)?;
    for row in rows {
        sink.accept(row)?;
    }
    sink.finish()
}

/// Parses the CSV format back into rows.
pub fn parse_csv<R: Read>(reader: R) -> Result<Vec<SweepRow>> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .context("empty input, expected a header line")?
        .context("reading header")?;
    if header.trim_end() != CSV_HEADER {
        bail!("unexpected header {header:?}");
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.context("reading row")?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            bail!("line {}: expected 10 fields, got {}", lineno + 2, fields.len());
        }
        let f = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .with_context(|| format!("line {}: field {i} {:?}", lineno + 2, fields[i]))
        };
        let u = |i: usize| -> Result<u64> {
            fields[i]
                .parse()
                .with_context(|| format!("line {}: field {i} {:?}", lineno + 2, fields[i]))
        };
        rows.push(SweepRow {
            axis_value: f(0)?,
            qber: f(1)?,
            qber_baseline: if fields[2].is_empty() { None } else { Some(f(2)?) },
            i_ab: f(3)?,
            i_ae: f(4)?,
            i_s: f(5)?,
            frames: u(6)?,
            bits: u(7)?,
            mean_iterations: f(8)?,
            seconds: f(9)?,
        });
    }
    Ok(rows)
}

/// Parses the JSON format back into rows.
pub fn parse_json<R: Read>(reader: R) -> Result<Vec<SweepRow>> {
    serde_json::from_reader(reader).context("decoding JSON rows")
}
