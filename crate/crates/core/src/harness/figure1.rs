//! The two panels of the decay figure.
//!
//! Panel A: `n^{1/p} · σ_m^{p,∞}` under the cone measure.
//! Panel B: `log10 σ_m^{p,∞}` under the sparse tensor measure (`β = p/n − 1`).
//! Both cover every `m ∈ [0, n−1]` for each `p`.

use std::f64::consts::LN_10;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{domain, Result};
use crate::estimators::{estimate_log_widths, estimate_widths, WidthQuery};
use crate::harness::output::{csv_error, format_float, timestamp_line};
use crate::samplers::{MeasureSpec, RngState};
use crate::sparse_approx::PNorm;

pub const PANEL_A_FILE: &str = "figure1_panel_a.csv";
pub const PANEL_B_FILE: &str = "figure1_panel_b.csv";

pub const PANEL_HEADER: [&str; 10] =
    ["p", "n", "m", "measure", "samples", "seed", "mean", "std_error", "value", "value_std_error"];

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Config {
    pub p_list: Vec<PNorm>,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self {
            p_list: [0.5, 1.0, 2.0].iter().map(|&p| PNorm::new(p).expect("positive")).collect(),
            n: 100,
            samples: 1_000_000,
            seed: 1,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelRow {
    pub p: PNorm,
    pub n: usize,
    pub m: usize,
    pub measure: String,
    pub samples: u64,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
    pub value: f64,
    pub value_std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1 {
    pub panel_a: Vec<PanelRow>,
    pub panel_b: Vec<PanelRow>,
}

/// Streams `2i` (panel A) and `2i + 1` (panel B) are used for the i-th `p`.
pub fn run_figure1(cfg: &Figure1Config) -> Result<Figure1> {
    if cfg.n < 2 {
        return Err(domain(format!("n must be at least 2, got {}", cfg.n)));
    }
    if cfg.p_list.is_empty() {
        return Err(domain("at least one p is required"));
    }
    let ms: Vec<usize> = (0..cfg.n).collect();
    let mut panel_a = Vec::with_capacity(cfg.p_list.len() * cfg.n);
    let mut panel_b = Vec::with_capacity(cfg.p_list.len() * cfg.n);
    for (i, &p) in cfg.p_list.iter().enumerate() {
        let scale = (cfg.n as f64).powf(p.reciprocal());
        let cone = MeasureSpec::cone(p, cfg.n)?;
        let query = WidthQuery::new(PNorm::INFINITY, ms.clone(), cone)?;
        let est = estimate_widths(&query, cfg.samples, RngState::new(cfg.seed, 2 * i as u64), cfg.workers)?;
        for (m, e) in est {
            panel_a.push(PanelRow {
                p,
                n: cfg.n,
                m,
                measure: cone.label(),
                samples: e.samples,
                seed: cfg.seed,
                mean: e.mean,
                std_error: e.std_error,
                value: scale * e.mean,
                value_std_error: scale * e.std_error,
            });
        }

        let sparse = MeasureSpec::tensor_sparse(p, cfg.n)?;
        let query = WidthQuery::new(PNorm::INFINITY, ms.clone(), sparse)?;
        let est = estimate_log_widths(&query, cfg.samples, RngState::new(cfg.seed, 2 * i as u64 + 1), cfg.workers)?;
        for (m, e) in est {
            let mean = e.ln_mean.exp();
            panel_b.push(PanelRow {
                p,
                n: cfg.n,
                m,
                measure: sparse.label(),
                samples: e.samples,
                seed: cfg.seed,
                mean,
                std_error: mean * e.relative_std_error,
                value: e.ln_mean / LN_10,
                value_std_error: e.relative_std_error / LN_10,
            });
        }
    }
    Ok(Figure1 { panel_a, panel_b })
}

pub fn write_panel<W: Write>(out: W, rows: &[PanelRow], timestamp: bool) -> Result<()> {
    let mut out = out;
    if timestamp {
        writeln!(out, "{}", timestamp_line())?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PANEL_HEADER).map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.p.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.measure.clone(),
            r.samples.to_string(),
            r.seed.to_string(),
            format_float(r.mean),
            format_float(r.std_error),
            format_float(r.value),
            format_float(r.value_std_error),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes both panels into `dir` and returns their paths.
pub fn write_figure1(dir: &Path, fig: &Figure1, timestamp: bool) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let a = dir.join(PANEL_A_FILE);
    let b = dir.join(PANEL_B_FILE);
    write_panel(std::io::BufWriter::new(std::fs::File::create(&a)?), &fig.panel_a, timestamp)?;
    write_panel(std::io::BufWriter::new(std::fs::File::create(&b)?), &fig.panel_b, timestamp)?;
    Ok((a, b))
}

/// Least-squares slope of `value` against `m` over the rows for `p` with `m ∈ [lo, hi]`.
pub fn panel_slope(rows: &[PanelRow], p: PNorm, lo: usize, hi: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.p == p && (lo..=hi).contains(&r.m))
        .map(|r| (r.m as f64, r.value))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|t| t.0).sum::<f64>() / k;
    let my = pts.iter().map(|t| t.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|t| (t.0 - mx) * (t.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|t| (t.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
