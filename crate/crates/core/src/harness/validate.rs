//! Named invariant suites. Each check carries a pass flag and a one-line detail
//! (z-score, relative spread or absolute error).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{
    bound_envelope, bridge_lemma1, lemma15_log_product_moment, lemma17_sequence, limit_constant_lemma17,
    theorem17_quadrature, EnvelopeKind,
};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_product_moment, estimate_unnormalized_order_stats, estimate_widths, ratio_check_prop10,
    EstimatorMode, MomentAccumulator, WidthQuery, DEFAULT_CI_LEVEL,
};
use crate::harness::figure1::{panel_slope, Figure1};
use crate::quadrature::{integrate_to_infinity, QuadOptions};
use crate::samplers::{sample_gen_gamma, GammaSampler, MeasureSpec, RngState};
use crate::sparse_approx::PNorm;
use crate::specfun::{
    inv_y_to_ln_omega, ln_reg_inc_gamma_pair_at_ln_x, log_gamma, reg_lower_inc_gamma, reg_upper_inc_gamma,
    tail_bound, IncGammaProfile, TailBoundCase,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Suite {
    Prop10,
    Lemma1,
    Lemma15,
    SurfaceCoincide,
    Thm17,
    Bounds,
    Specfun,
    Samplers,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Self::Prop10,
        Self::Lemma1,
        Self::Lemma15,
        Self::SurfaceCoincide,
        Self::Thm17,
        Self::Bounds,
        Self::Specfun,
        Self::Samplers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Prop10 => "prop10",
            Self::Lemma1 => "lemma1",
            Self::Lemma15 => "lemma15",
            Self::SurfaceCoincide => "surface_coincide",
            Self::Thm17 => "thm17",
            Self::Bounds => "bounds",
            Self::Specfun => "specfun",
            Self::Samplers => "samplers",
            Self::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::EACH
            .into_iter()
            .chain([Self::All])
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

/// Sample count, seed and worker count shared by the Monte Carlo checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Budget {
    fn stream(&self, id: u64) -> RngState {
        RngState::new(self.seed, id)
    }
}

pub fn run_suite(suite: Suite, budget: Budget) -> Result<Vec<Check>> {
    match suite {
        Suite::Prop10 => prop10_checks(budget),
        Suite::Lemma1 => lemma1_checks(budget),
        Suite::Lemma15 => lemma15_checks(budget),
        Suite::SurfaceCoincide => surface_coincide_checks(budget),
        Suite::Thm17 => thm17_checks(budget),
        Suite::Bounds => {
            let mut out = thm6_stability_checks(budget)?;
            out.extend(bounds_checks(budget)?);
            Ok(out)
        }
        Suite::Specfun => specfun_checks(budget.seed),
        Suite::Samplers => sampler_law_checks(budget),
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, budget)?);
            }
            Ok(out)
        }
    }
}

fn pn(v: f64) -> PNorm {
    PNorm::new(v).expect("positive exponent")
}

fn within_sigma(diff: f64, se: f64, k: f64) -> (bool, f64) {
    let z = if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
    (z.abs() < k, z)
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

/// Volume/cone ratio against `n/(n+1)`, `|z| < 4`.
pub fn prop10_checks(budget: Budget) -> Result<Vec<Check>> {
    let cases = [(pn(1.0), PNorm::INFINITY, 0), (pn(2.0), pn(2.0), 0), (pn(0.5), PNorm::INFINITY, 5)];
    let mut out = Vec::new();
    let mut stream = 0;
    for (p, q, m) in cases {
        for n in [10, 100] {
            let r = ratio_check_prop10(p, q, n, m, budget.samples, budget.stream(stream), budget.workers)?;
            stream += 2;
            out.push(Check::new(
                format!("prop10 p={p} q={q} m={m} n={n}"),
                r.z_score.abs() < 4.0,
                format!("ratio={:.6} target={:.6} z={:.3}", r.ratio, n as f64 / (n as f64 + 1.0), r.z_score),
            ));
        }
    }
    Ok(out)
}

/// Sphere average of `x*_m` against the bridge factor times `E ω*_m`, within 4σ.
pub fn lemma1_checks(budget: Budget) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut stream = 0;
    for p in [pn(0.5), pn(1.0), pn(2.0)] {
        for n in [5, 50] {
            let query = WidthQuery::new(PNorm::INFINITY, vec![0, 2], MeasureSpec::cone(p, n)?)?;
            let sphere = estimate_widths(&query, budget.samples, budget.stream(stream), budget.workers)?;
            let free = estimate_unnormalized_order_stats(
                p,
                n,
                &[1, 3],
                budget.samples,
                budget.stream(stream + 1),
                budget.workers,
            )?;
            stream += 2;
            let b = bridge_lemma1(p, n)?.value;
            for m in [1, 3] {
                let s = sphere[&(m - 1)];
                let u = free[&m];
                let se = s.std_error.hypot(b * u.std_error);
                let (ok, z) = within_sigma(s.mean - b * u.mean, se, 4.0);
                out.push(Check::new(
                    format!("lemma1 p={p} n={n} m={m}"),
                    ok,
                    format!("sphere={:.6e} bridged={:.6e} z={z:.3}", s.mean, b * u.mean),
                ));
            }
        }
    }
    Ok(out)
}

/// Product moment `E Π ω^β` against its closed form, within 4σ.
pub fn lemma15_checks(budget: Budget) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut stream = 0;
    for p in [pn(0.5), pn(1.0), pn(2.0)] {
        for beta in [-0.25, 0.5, 1.0] {
            for n in [2, 3] {
                let est = estimate_product_moment(p, beta, n, budget.samples, budget.stream(stream), budget.workers)?;
                stream += 1;
                let exact = lemma15_log_product_moment(p, beta, n)?.exp();
                let (ok, z) = within_sigma(est.mean - exact, est.std_error, 4.0);
                out.push(Check::new(
                    format!("lemma15 p={p} beta={beta} n={n}"),
                    ok,
                    format!("mc={:.6e} exact={exact:.6e} z={z:.3}", est.mean),
                ));
            }
        }
    }
    Ok(out)
}

/// Self-normalized surface estimates equal plain cone estimates on a shared stream
/// for `p ∈ {1, 2}`, to relative 1e-12.
pub fn surface_coincide_checks(budget: Budget) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [pn(1.0), pn(2.0)] {
        for n in [10, 100] {
            for q in [p, PNorm::INFINITY] {
                let ms: Vec<usize> = vec![0, 1, n / 2, n - 1];
                let state = budget.stream(0);
                let cone = estimate_widths(&WidthQuery::new(q, ms.clone(), MeasureSpec::cone(p, n)?)?, budget.samples, state, budget.workers)?;
                let surf = estimate_widths(&WidthQuery::new(q, ms.clone(), MeasureSpec::surface(p, n)?)?, budget.samples, state, budget.workers)?;
                let mut worst = 0.0f64;
                let mut modes_ok = true;
                for m in &ms {
                    let (c, s) = (cone[m], surf[m]);
                    modes_ok &= c.mode == EstimatorMode::Plain && s.mode == EstimatorMode::SelfNormalized;
                    let scale = c.mean.abs().max(f64::MIN_POSITIVE);
                    worst = worst.max((c.mean - s.mean).abs() / scale);
                }
                out.push(Check::new(
                    format!("surface_coincide p={p} q={q} n={n}"),
                    modes_ok && worst <= 1e-12,
                    format!("max_rel_diff={worst:.3e}"),
                ));
            }
        }
    }
    Ok(out)
}

/// Quadrature value of `E x*_m` under the sparse tensor measure against Monte
/// Carlo, within 3σ.
pub fn thm17_checks(budget: Budget) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut stream = 0;
    for p in [pn(0.5), pn(1.0), pn(2.0)] {
        for n in [10, 100] {
            let query = WidthQuery::new(PNorm::INFINITY, vec![0, 1, 2], MeasureSpec::tensor_sparse(p, n)?)?;
            let est = estimate_widths(&query, budget.samples, budget.stream(stream), budget.workers)?;
            stream += 1;
            for m in [1, 2, 3] {
                let v = theorem17_quadrature(p, n, m)?;
                let e = est[&(m - 1)];
                let (ok, z) = within_sigma(e.mean - v, e.std_error, 3.0);
                out.push(Check::new(
                    format!("thm17 p={p} n={n} m={m}"),
                    ok,
                    format!("quadrature={v:.9e} mc={:.9e} z={z:.3}", e.mean),
                ));
            }
        }
    }
    Ok(out)
}

/// Consecutive quadrature ratios `V_m / V_{m+1}` for `m = 1..8` at `n` against `1/p + 1`, within 10%.
pub fn decay_checks(n: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [pn(0.5), pn(1.0), pn(2.0)] {
        let target = p.reciprocal() + 1.0;
        let v: Vec<f64> = (1..=9).map(|m| theorem17_quadrature(p, n, m)).collect::<Result<_>>()?;
        let ratios: Vec<f64> = v.windows(2).map(|w| w[0] / w[1]).collect();
        let worst = ratios.iter().map(|r| (r / target - 1.0).abs()).fold(0.0, f64::max);
        let listed: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
        out.push(Check::new(
            format!("decay p={p} n={n}"),
            worst <= 0.10,
            format!("target={target} ratios=[{}] worst_rel_dev={worst:.3}", listed.join(",")),
        ));
    }
    Ok(out)
}

/// `mean / [log(en)/n]^{1/p}` at `m = 0` under the cone measure varies by less
/// than a factor 2 over `n ∈ {10, 100, 1000}`.
pub fn thm6_stability_checks(budget: Budget) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut stream = 100;
    for p in [pn(0.5), pn(1.0), pn(2.0)] {
        let mut ratios = Vec::new();
        for n in [10, 100, 1000] {
            let query = WidthQuery::new(PNorm::INFINITY, vec![0], MeasureSpec::cone(p, n)?)?;
            let e = estimate_widths(&query, budget.samples, budget.stream(stream), budget.workers)?[&0];
            stream += 1;
            ratios.push(e.mean / bound_envelope(EnvelopeKind::Thm6Upper, p, PNorm::INFINITY, n, 0)?);
        }
        let s = spread(&ratios);
        out.push(Check::new(
            format!("thm6 stability p={p}"),
            s < 2.0,
            format!("ratios=[{:.4},{:.4},{:.4}] spread={s:.4}", ratios[0], ratios[1], ratios[2]),
        ));
    }
    Ok(out)
}

/// Surface and `q < ∞` cone estimates at `m = 0` against their envelope shapes
/// over `n ∈ {10, 100, 1000}`, and containment below the worst case
/// `(m+1)^{1/q-1/p}`. The surface shape is an upper bound, so its ratio only
/// has to stay below twice its value at `n = 10`; the cone shape is two-sided
/// and its ratio has to vary by less than a factor 2.
pub fn bounds_checks(budget: Budget) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut stream = 200;
    let ns = [10, 100, 1000];
    let cases = [
        (EnvelopeKind::Thm9Upper, pn(0.5), PNorm::INFINITY),
        (EnvelopeKind::Thm9Upper, pn(1.0), pn(2.0)),
        (EnvelopeKind::Thm9Upper, pn(2.0), PNorm::INFINITY),
        (EnvelopeKind::Prop12, pn(0.5), pn(1.0)),
        (EnvelopeKind::Prop12, pn(1.0), pn(2.0)),
    ];
    for (kind, p, q) in cases {
        let mut ratios = Vec::new();
        let mut contained = true;
        for n in ns {
            let spec = if kind == EnvelopeKind::Thm9Upper { MeasureSpec::surface(p, n)? } else { MeasureSpec::cone(p, n)? };
            let e = estimate_widths(&WidthQuery::new(q, vec![0], spec)?, budget.samples, budget.stream(stream), budget.workers)?[&0];
            stream += 1;
            ratios.push(e.mean / bound_envelope(kind, p, q, n, 0)?);
            contained &= e.mean <= bound_envelope(EnvelopeKind::Eq1, p, q, n, 0)? + 4.0 * e.std_error;
        }
        let listed = format!("ratios=[{:.4},{:.4},{:.4}]", ratios[0], ratios[1], ratios[2]);
        if kind == EnvelopeKind::Thm9Upper {
            // One-sided: the ratio may shrink with n but must not grow.
            let growth = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max) / ratios[0];
            out.push(Check::new(
                format!("{kind} bounded p={p} q={q}"),
                growth < 2.0,
                format!("{listed} growth={growth:.4}"),
            ));
        } else {
            let s = spread(&ratios);
            out.push(Check::new(format!("{kind} stability p={p} q={q}"), s < 2.0, format!("{listed} spread={s:.4}")));
        }
        out.push(Check::new(format!("eq1 containment p={p} q={q}"), contained, "mean <= (m+1)^{1/q-1/p}"));
    }
    Ok(out)
}

/// `max |P(1/n, ω(y)) - y|` over `n ∈ {1, 2, 5, 10, 100, 1000}` and 2001 points `y ∈ [0, 1 - 1e-6]`.
pub fn round_trip_error() -> Result<f64> {
    let mut worst = 0.0f64;
    let k = 2000;
    for n in [1, 2, 5, 10, 100, 1000] {
        let profile = IncGammaProfile::new(n)?;
        for i in 0..=k {
            let y = (1.0 - 1e-6) * i as f64 / k as f64;
            let ln_omega = inv_y_to_ln_omega(&profile, y)?;
            let back = if ln_omega.exp() >= f64::MIN_POSITIVE {
                reg_lower_inc_gamma(profile.shape(), ln_omega.exp())?
            } else {
                ln_reg_inc_gamma_pair_at_ln_x(profile.shape(), ln_omega)?.0.exp()
            };
            worst = worst.max((back - y).abs());
        }
    }
    Ok(worst)
}

/// `∫_δ^∞ u^α e^{-u} du` by the incomplete gamma function for `α > -1`, by quadrature otherwise.
pub fn tail_integral(alpha: f64, delta: f64) -> Result<f64> {
    if alpha > -1.0 {
        Ok(log_gamma(alpha + 1.0)?.exp() * reg_upper_inc_gamma(alpha + 1.0, delta)?)
    } else {
        let opts = QuadOptions { rel_tol: 1e-12, ..QuadOptions::default() };
        Ok(integrate_to_infinity(|u| u.powf(alpha) * (-u).exp(), delta, opts)?.value)
    }
}

/// Random `(α, δ)` pairs covering both the `α < δ` and `α > δ` branches of the tail bound.
pub fn tail_bound_cases(seed: u64, count: usize) -> Result<Vec<TailBoundCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            if i % 4 == 3 {
                let delta = rng.random_range(0.5..5.0);
                TailBoundCase::new(delta * rng.random_range(1.05..4.0), delta)
            } else {
                let alpha: f64 = rng.random_range(-3.0..3.0);
                let delta = (2.0 * alpha.abs()).max(1.0) * rng.random_range(1.01..4.0);
                TailBoundCase::new(alpha, delta)
            }
        })
        .collect()
}

pub fn specfun_checks(seed: u64) -> Result<Vec<Check>> {
    let rt = round_trip_error()?;
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    let cases = tail_bound_cases(seed, 200)?;
    for case in &cases {
        let truth = tail_integral(case.alpha(), case.delta())?;
        let bound = tail_bound(case)?;
        tightest = tightest.min(bound / truth);
        if truth > bound * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    let lim = (lemma17_sequence(10_000)? - limit_constant_lemma17()).abs();
    Ok(vec![
        Check::new("specfun round trip", rt <= 1e-10, format!("max_abs_err={rt:.3e}")),
        Check::new(
            "specfun tail bound",
            violations == 0,
            format!("cases={} violations={violations} min_bound_over_truth={tightest:.6}", cases.len()),
        ),
        Check::new("specfun gamma limit", lim < 1e-3, format!("abs_err={lim:.3e} at n=10000")),
    ])
}

/// First and second moments of `ω^β`-tilted generalized gamma draws against
/// Γ-ratio formulas on `{1/2, 1, 2} × {-1/2, 0, 1}`, and the mean of a gamma
/// variate with shape 1/100; all within 4σ.
pub fn sampler_law_checks(budget: Budget) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut stream = 300;
    for p in [pn(0.5), pn(1.0), pn(2.0)] {
        for beta in [-0.5, 0.0, 1.0] {
            let mut rng = budget.stream(stream).rng();
            stream += 1;
            let mut first = MomentAccumulator::new();
            let mut second = MomentAccumulator::new();
            for _ in 0..budget.samples {
                let t = sample_gen_gamma(p, beta, &mut rng)?;
                first.push(t);
                second.push(t * t);
            }
            // density ∝ t^β e^{-t^p}: E t^k = Γ((β+1+k)/p) / Γ((β+1)/p)
            let lg0 = log_gamma((beta + 1.0) / p.value())?;
            for (k, acc) in [(1.0, &first), (2.0, &second)] {
                let exact = (log_gamma((beta + 1.0 + k) / p.value())? - lg0).exp();
                let e = acc.finish(EstimatorMode::Plain, DEFAULT_CI_LEVEL)?;
                let (ok, z) = within_sigma(e.mean - exact, e.std_error, 4.0);
                out.push(Check::new(
                    format!("gen-gamma moment{k} p={p} beta={beta}"),
                    ok,
                    format!("mc={:.6e} exact={exact:.6e} z={z:.3}", e.mean),
                ));
            }
        }
    }
    let gamma = GammaSampler::new(0.01)?;
    let mut rng = budget.stream(stream).rng();
    let mut acc = MomentAccumulator::new();
    for _ in 0..budget.samples {
        acc.push(gamma.sample(&mut rng));
    }
    let e = acc.finish(EstimatorMode::Plain, DEFAULT_CI_LEVEL)?;
    let (ok, z) = within_sigma(e.mean - 0.01, e.std_error, 4.0);
    out.push(Check::new("gamma shape=0.01 mean", ok, format!("mc={:.6e} z={z:.3}", e.mean)));
    Ok(out)
}

/// Panel B decreasing with slope over `m ∈ [1, 8]` within 15% of `-log10(1/p+1)`;
/// panel A at `m = 0` inside `(1, 3 log(en)^{1/p})`.
pub fn figure1_checks(fig: &Figure1) -> Vec<Check> {
    let mut ps: Vec<PNorm> = fig.panel_b.iter().map(|r| r.p).collect();
    ps.dedup();
    let mut out = Vec::new();
    for p in ps {
        let b: Vec<f64> = fig.panel_b.iter().filter(|r| r.p == p).map(|r| r.value).collect();
        let decreasing = b.windows(2).all(|w| w[1] < w[0]);
        out.push(Check::new(format!("figure1 panel B decreasing p={p}"), decreasing, format!("rows={}", b.len())));

        let target = -(p.reciprocal() + 1.0).log10();
        let slope = panel_slope(&fig.panel_b, p, 1, 8);
        let dev = slope.map(|s| (s / target - 1.0).abs());
        out.push(Check::new(
            format!("figure1 panel B slope p={p}"),
            dev.is_some_and(|d| d <= 0.15),
            format!("slope={:.4} target={target:.4} rel_dev={:.3}", slope.unwrap_or(f64::NAN), dev.unwrap_or(f64::NAN)),
        ));

        match fig.panel_a.iter().find(|r| r.p == p && r.m == 0) {
            Some(r) => {
                let upper = 3.0 * (1.0 + (r.n as f64).ln()).powf(p.reciprocal());
                out.push(Check::new(
                    format!("figure1 panel A band p={p}"),
                    r.value > 1.0 && r.value < upper,
                    format!("value={:.4} band=(1, {upper:.4})", r.value),
                ));
            }
            None => out.push(Check::new(format!("figure1 panel A band p={p}"), false, "no m=0 row")),
        }
    }
    out
}
