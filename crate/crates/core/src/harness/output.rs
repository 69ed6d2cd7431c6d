//! CSV and JSON emission of result tables.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::ser::{Serialize, Serializer};

use crate::error::Result;
use crate::sparse_approx::PNorm;

pub const CSV_HEADER: [&str; 14] = [
    "p",
    "q",
    "n",
    "m",
    "measure",
    "estimator_mode",
    "samples",
    "mean",
    "std_error",
    "ci_low",
    "ci_high",
    "seed",
    "analytic_value",
    "envelope_value",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Exponent as written to tables: the shortest round-trip decimal or `inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Param(pub PNorm);

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0.value())
        } else {
            s.serialize_str("inf")
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ResultRow {
    pub p: Param,
    pub q: Param,
    pub n: usize,
    pub m: usize,
    pub measure: String,
    pub estimator_mode: String,
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub analytic_value: Option<f64>,
    pub envelope_value: Option<f64>,
}

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn timestamp_line() -> String {
    format!("# generated {}", chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

pub fn write_csv<W: Write>(out: W, rows: &[ResultRow], timestamp: bool) -> Result<()> {
    let mut out = out;
    if timestamp {
        writeln!(out, "{}", timestamp_line())?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.p.0.to_string(),
            r.q.0.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.measure.clone(),
            r.estimator_mode.clone(),
            r.samples.to_string(),
            format_float(r.mean),
            format_float(r.std_error),
            format_float(r.ci_low),
            format_float(r.ci_high),
            r.seed.to_string(),
            format_opt(r.analytic_value),
            format_opt(r.envelope_value),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// An array of objects with the CSV field names. Never carries a timestamp.
pub fn write_json<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| io::Error::other(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> crate::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e.into(),
        other => io::Error::other(format!("{other:?}")).into(),
    }
}

/// Opens `path` for writing, or stdout when `path` is `None`.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
