//! `lpwidths` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::analytic::{
    bound_envelope, bridge_lemma1, lemma17_sequence, limit_constant_lemma17, theorem17_bounds,
    theorem17_quadrature, EnvelopeKind,
};
use crate::error::{Error, Result};
use crate::estimators::{estimate_widths_with_level, WidthQuery, DEFAULT_CI_LEVEL};
use crate::harness::figure1::{run_figure1, write_figure1, Figure1Config};
use crate::harness::output::{csv_error, format_float, open_output, write_csv, write_json, OutputFormat, Param, ResultRow};
use crate::harness::validate::{run_suite, Budget, Suite};
use crate::harness::{exit_code_for, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use crate::samplers::{MeasureKind, MeasureSpec, RngState};
use crate::sparse_approx::PNorm;

pub const WORKERS_ENV: &str = "LPWIDTHS_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "lpwidths", version, about = "Average best m-term approximation widths of l_p^n in l_q^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo estimate of the average width for each m.
    Estimate(EstimateArgs),
    /// Data for both panels of the decay figure.
    Figure1(Figure1Args),
    /// Run a named invariant suite.
    Validate(ValidateArgs),
    /// Closed-form and quadrature quantities.
    #[command(subcommand)]
    Analytic(AnalyticCommand),
}

/// An inclusive range `a..b` or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MRange {
    pub start: usize,
    pub end: usize,
}

impl MRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).collect()
    }
}

impl FromStr for MRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("expected an integer or a range a..b, got '{s}'");
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let v = s.trim().parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if start > end {
            return Err(format!("empty range '{s}'"));
        }
        Ok(Self { start, end })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureArg {
    Cone,
    Volume,
    Surface,
    Tensor(f64),
    TensorSparse,
}

impl MeasureArg {
    pub fn spec(self, p: PNorm, n: usize) -> Result<MeasureSpec> {
        match self {
            Self::Cone => MeasureSpec::cone(p, n),
            Self::Volume => MeasureSpec::volume(p, n),
            Self::Surface => MeasureSpec::surface(p, n),
            Self::Tensor(beta) => MeasureSpec::tensor(p, n, beta),
            Self::TensorSparse => MeasureSpec::tensor_sparse(p, n),
        }
    }
}

impl FromStr for MeasureArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "cone" => Ok(Self::Cone),
            "volume" => Ok(Self::Volume),
            "surface" => Ok(Self::Surface),
            "tensor-sparse" => Ok(Self::TensorSparse),
            other => match other.strip_prefix("tensor:") {
                Some(b) => {
                    let beta: f64 = b.trim().parse().map_err(|_| format!("bad beta in '{s}'"))?;
                    if beta > -1.0 && beta.is_finite() {
                        Ok(Self::Tensor(beta))
                    } else {
                        Err(format!("beta must be finite and > -1, got {b}"))
                    }
                }
                None => Err(format!("expected cone|volume|surface|tensor:<beta>|tensor-sparse, got '{s}'")),
            },
        }
    }
}

fn parse_pnorm(s: &str) -> std::result::Result<PNorm, String> {
    s.parse::<PNorm>().map_err(|e| e.to_string())
}

/// Accepts plain integers and integral scientific notation such as `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.trim().parse::<u64>() {
        return Ok(v);
    }
    match s.trim().parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("expected a nonnegative integer, got '{s}'")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Defaults to LPWIDTHS_WORKERS, then to the available parallelism.
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
}

impl RunArgs {
    fn workers(&self) -> Result<usize> {
        match self.workers {
            Some(0) => Err(Error::Config("--workers must be at least 1".into())),
            Some(w) => Ok(w),
            None => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
        }
    }

    fn check_samples(&self) -> Result<()> {
        if self.samples < 10 {
            return Err(Error::Config(format!("--samples must be at least 10, got {}", self.samples)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[arg(long, value_parser = parse_pnorm)]
    pub p: PNorm,
    #[arg(long, value_parser = parse_pnorm, default_value = "inf")]
    pub q: PNorm,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// A single m or an inclusive range a..b.
    #[arg(long, default_value = "0")]
    pub m: MRange,
    /// cone | volume | surface | tensor:<beta> | tensor-sparse
    #[arg(long, default_value = "cone")]
    pub measure: MeasureArg,
    #[command(flatten)]
    pub run: RunArgs,
    /// Confidence level of the reported interval.
    #[arg(long, default_value_t = DEFAULT_CI_LEVEL)]
    pub ci: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp comment line.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Figure1Args {
    /// Comma-separated exponents.
    #[arg(long = "p", value_parser = parse_pnorm, value_delimiter = ',', default_value = "1/2,1,2")]
    pub p_list: Vec<PNorm>,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[command(flatten)]
    pub run: RunArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyticCommand {
    /// Quadrature value of E x*_m under the sparse tensor measure, with its two-sided bounds.
    /// Here m is the rank in [1, n].
    Thm17 {
        #[arg(long, value_parser = parse_pnorm)]
        p: PNorm,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        m: MRange,
    },
    /// Γ(n/p) / Γ(n/p + 1/p).
    Bridge {
        #[arg(long, value_parser = parse_pnorm)]
        p: PNorm,
        #[arg(long)]
        n: usize,
    },
    /// Shape function of a bound (constant 1).
    Envelope {
        /// thm6-upper | thm6-lower | thm9-upper | prop12 | eq1
        #[arg(long)]
        kind: String,
        #[arg(long, value_parser = parse_pnorm)]
        p: PNorm,
        #[arg(long, value_parser = parse_pnorm, default_value = "inf")]
        q: PNorm,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0")]
        m: MRange,
    },
    /// (Γ(1/n)/n)^n next to its limit e^{-C}.
    Limit {
        #[arg(long, default_value_t = 10_000)]
        n: usize,
    },
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Estimate(a) => cmd_estimate(&a).map(|()| EXIT_OK),
        Command::Figure1(a) => cmd_figure1(&a).map(|()| EXIT_OK),
        Command::Validate(a) => cmd_validate(&a),
        Command::Analytic(a) => cmd_analytic(&a).map(|()| EXIT_OK),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn config(msg: String) -> Error {
    Error::Config(msg)
}

/// Checks every field of an `estimate` invocation and builds the query.
pub fn estimate_query(a: &EstimateArgs) -> Result<WidthQuery> {
    if !a.p.is_finite() {
        return Err(config(format!("--p must be finite, got {}", a.p)));
    }
    if a.n < 2 {
        return Err(config(format!("--n must be at least 2, got {}", a.n)));
    }
    if a.p > a.q {
        return Err(config(format!("--q must be at least --p, got p={}, q={}", a.p, a.q)));
    }
    if a.m.end > a.n - 1 {
        return Err(config(format!("--m must lie in [0, {}], got {}..{}", a.n - 1, a.m.start, a.m.end)));
    }
    a.run.check_samples()?;
    if !(a.ci > 0.0 && a.ci < 1.0) {
        return Err(config(format!("--ci must lie in (0, 1), got {}", a.ci)));
    }
    a.run.workers()?;
    let spec = a.measure.spec(a.p, a.n).map_err(|e| config(format!("--measure: {e}")))?;
    WidthQuery::new(a.q, a.m.values(), spec).map_err(|e| config(e.to_string()))
}

/// Exact value of the row's estimand where one is available.
pub fn analytic_value(spec: &MeasureSpec, q: PNorm, m: usize) -> Option<f64> {
    let (p, n) = (spec.p(), spec.n());
    if spec.kind() == MeasureKind::TensorSparse && !q.is_finite() {
        return theorem17_quadrature(p, n, m + 1).ok();
    }
    if p == q && m == 0 {
        if spec.on_sphere() {
            return Some(1.0);
        }
        if spec.kind() == MeasureKind::Volume {
            return Some(n as f64 / (n as f64 + 1.0));
        }
    }
    None
}

/// Shape of the bound that governs the row's estimand (constant 1).
pub fn envelope_value(spec: &MeasureSpec, q: PNorm, m: usize) -> Option<f64> {
    let (p, n) = (spec.p(), spec.n());
    let kind = match spec.kind() {
        MeasureKind::TensorSparse if !q.is_finite() => return theorem17_bounds(p, n, m + 1).ok().map(|b| b.0),
        MeasureKind::Surface if m == 0 => EnvelopeKind::Thm9Upper,
        MeasureKind::Cone | MeasureKind::Volume if !q.is_finite() => EnvelopeKind::Thm6Upper,
        MeasureKind::Cone if m == 0 => EnvelopeKind::Prop12,
        _ => EnvelopeKind::Eq1,
    };
    bound_envelope(kind, p, q, n, m).ok()
}

pub fn estimate_rows(a: &EstimateArgs) -> Result<Vec<ResultRow>> {
    let query = estimate_query(a)?;
    let workers = a.run.workers()?;
    let est = estimate_widths_with_level(&query, a.run.samples, RngState::new(a.run.seed, 0), workers, a.ci)?;
    let spec = *query.measure();
    Ok(est
        .into_iter()
        .map(|(m, e)| ResultRow {
            p: Param(a.p),
            q: Param(a.q),
            n: a.n,
            m,
            measure: spec.label(),
            estimator_mode: e.mode.to_string(),
            samples: e.samples,
            mean: e.mean,
            std_error: e.std_error,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            seed: a.run.seed,
            analytic_value: analytic_value(&spec, a.q, m),
            envelope_value: envelope_value(&spec, a.q, m),
        })
        .collect())
}

fn cmd_estimate(a: &EstimateArgs) -> Result<()> {
    let rows = estimate_rows(a)?;
    let out = open_output(a.out.as_deref())?;
    match a.format {
        OutputFormat::Csv => write_csv(out, &rows, !a.no_timestamp)?,
        OutputFormat::Json => write_json(out, &rows)?,
    }
    for r in &rows {
        eprintln!(
            "{} p={} q={} n={} m={}: mean={} se={} [{}, {}]",
            r.measure,
            r.p.0,
            r.q.0,
            r.n,
            r.m,
            format_float(r.mean),
            format_float(r.std_error),
            format_float(r.ci_low),
            format_float(r.ci_high)
        );
    }
    Ok(())
}

fn cmd_figure1(a: &Figure1Args) -> Result<()> {
    if a.n < 2 {
        return Err(config(format!("--n must be at least 2, got {}", a.n)));
    }
    if let Some(p) = a.p_list.iter().find(|p| !p.is_finite()) {
        return Err(config(format!("--p entries must be finite, got {p}")));
    }
    a.run.check_samples()?;
    let cfg = Figure1Config { p_list: a.p_list.clone(), n: a.n, samples: a.run.samples, seed: a.run.seed, workers: a.run.workers()? };
    let fig = run_figure1(&cfg)?;
    let (pa, pb) = write_figure1(&a.out, &fig, !a.no_timestamp)?;
    eprintln!("wrote {} rows to {}", fig.panel_a.len(), pa.display());
    eprintln!("wrote {} rows to {}", fig.panel_b.len(), pb.display());
    Ok(())
}

fn cmd_validate(a: &ValidateArgs) -> Result<i32> {
    if a.samples < 10 {
        return Err(config(format!("--samples must be at least 10, got {}", a.samples)));
    }
    let workers = RunArgs { samples: a.samples, seed: a.seed, workers: a.workers }.workers()?;
    let checks = run_suite(a.suite, Budget { samples: a.samples, seed: a.seed, workers })?;
    let mut out = std::io::stdout().lock();
    for c in &checks {
        writeln!(out, "{c}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "{} checks, {failed} failed", checks.len())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_analytic(cmd: &AnalyticCommand) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    match cmd {
        AnalyticCommand::Thm17 { p, n, m } => {
            if *n < 2 || m.start < 1 || m.end > *n {
                return Err(config(format!("--m must lie in [1, {n}] and --n must be at least 2")));
            }
            w.write_record(["p", "n", "m", "value", "lower", "upper"]).map_err(csv_error)?;
            for k in m.values() {
                let v = theorem17_quadrature(*p, *n, k)?;
                let (lo, hi) = theorem17_bounds(*p, *n, k)?;
                w.write_record([p.to_string(), n.to_string(), k.to_string(), format_float(v), format_float(lo), format_float(hi)])
                    .map_err(csv_error)?;
            }
        }
        AnalyticCommand::Bridge { p, n } => {
            let b = bridge_lemma1(*p, *n)?;
            w.write_record(["p", "n", "value"]).map_err(csv_error)?;
            w.write_record([p.to_string(), n.to_string(), format_float(b.value)]).map_err(csv_error)?;
        }
        AnalyticCommand::Envelope { kind, p, q, n, m } => {
            let k: EnvelopeKind = kind.parse().map_err(|e: Error| config(format!("--kind: {e}")))?;
            w.write_record(["kind", "p", "q", "n", "m", "value"]).map_err(csv_error)?;
            for mm in m.values() {
                let v = bound_envelope(k, *p, *q, *n, mm)?;
                w.write_record([k.to_string(), p.to_string(), q.to_string(), n.to_string(), mm.to_string(), format_float(v)])
                    .map_err(csv_error)?;
            }
        }
        AnalyticCommand::Limit { n } => {
            let s = lemma17_sequence(*n)?;
            let c = limit_constant_lemma17();
            w.write_record(["n", "sequence", "limit", "abs_diff"]).map_err(csv_error)?;
            w.write_record([n.to_string(), format_float(s), format_float(c), format_float((s - c).abs())]).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}
