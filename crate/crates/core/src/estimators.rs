//! Monte Carlo estimation of average best m-term widths.
//!
//! Each worker owns an independent stream and a set of [`MomentAccumulator`]s,
//! one per requested `m`. All `m` share the same points. Worker accumulators
//! are merged in worker order, so results depend only on `(seed, workers)`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::compensated::CompensatedSum;
use crate::error::{domain, Error, Result};
use crate::samplers::{GammaSampler, MeasureSpec, PointSampler, RngState};
use crate::sparse_approx::{best_m_term_errors_sorted, sort_non_increasing, PNorm};
use crate::specfun::inv_reg_lower_inc_gamma_ln;

pub const DEFAULT_CI_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMode {
    Plain,
    SelfNormalized,
}

impl fmt::Display for EstimatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorMode::Plain => "plain",
            EstimatorMode::SelfNormalized => "self_normalized",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthQuery {
    p: PNorm,
    q: PNorm,
    m_values: Vec<usize>,
    measure: MeasureSpec,
}

impl WidthQuery {
    /// `m_values` are sorted and deduplicated.
    pub fn new(q: PNorm, mut m_values: Vec<usize>, measure: MeasureSpec) -> Result<Self> {
        let p = measure.p();
        let n = measure.n();
        if p > q {
            return Err(domain(format!("need p <= q, got p={p}, q={q}")));
        }
        if m_values.is_empty() {
            return Err(domain("at least one m is required"));
        }
        m_values.sort_unstable();
        m_values.dedup();
        if let Some(&m) = m_values.last().filter(|&&m| m >= n) {
            return Err(domain(format!("m = {m} outside [0, {}]", n - 1)));
        }
        Ok(Self { p, q, m_values, measure })
    }

    pub fn p(&self) -> PNorm {
        self.p
    }

    pub fn q(&self) -> PNorm {
        self.q
    }

    pub fn n(&self) -> usize {
        self.measure.n()
    }

    pub fn m_values(&self) -> &[usize] {
        &self.m_values
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }
}

/// Streaming weighted mean and variance.
///
/// `push` is the plain Welford update; `push_weighted` is West's weighted
/// form, which reduces to it for unit weights. A second accumulator of the
/// same kind with weights `w²` supplies the self-normalized standard error.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
    weight_sum: CompensatedSum,
    sq_weight_sum: CompensatedSum,
    sq_mean: f64,
    sq_m2: f64,
    unit_weights: bool,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self { unit_weights: true, ..Self::default() }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn weight_sum(&self) -> f64 {
        self.weight_sum.value()
    }

    /// `Σ w_i x_i`.
    pub fn weighted_mean_num(&self) -> f64 {
        self.mean * self.weight_sum()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.push_weighted(x, 1.0);
    }

    #[inline]
    pub fn push_weighted(&mut self, x: f64, w: f64) {
        if w == 0.0 {
            self.count += 1;
            self.unit_weights = false;
            return;
        }
        self.count += 1;
        self.unit_weights &= w == 1.0;
        self.weight_sum.add(w);
        let total = self.weight_sum.value();
        let delta = x - self.mean;
        self.mean += delta * w / total;
        self.m2 += w * delta * (x - self.mean);

        let w2 = w * w;
        self.sq_weight_sum.add(w2);
        let total2 = self.sq_weight_sum.value();
        let delta2 = x - self.sq_mean;
        self.sq_mean += delta2 * w2 / total2;
        self.sq_m2 += w2 * delta2 * (x - self.sq_mean);
    }

    /// Chan's pairwise combination.
    pub fn merge(&self, other: &Self) -> Self {
        let wa = self.weight_sum();
        let wb = other.weight_sum();
        let mut out = *self;
        out.count += other.count;
        out.unit_weights = self.unit_weights && other.unit_weights;
        if wb == 0.0 {
            return out;
        }
        if wa == 0.0 {
            let mut o = *other;
            o.count = out.count;
            o.unit_weights = out.unit_weights;
            return o;
        }
        out.weight_sum.merge(&other.weight_sum);
        let total = out.weight_sum.value();
        let delta = other.mean - self.mean;
        out.mean = self.mean + delta * (wb / total);
        out.m2 = self.m2 + other.m2 + delta * delta * (wa * wb / total);

        let va = self.sq_weight_sum.value();
        let vb = other.sq_weight_sum.value();
        out.sq_weight_sum.merge(&other.sq_weight_sum);
        let total2 = out.sq_weight_sum.value();
        let delta2 = other.sq_mean - self.sq_mean;
        out.sq_mean = self.sq_mean + delta2 * (vb / total2);
        out.sq_m2 = self.sq_m2 + other.sq_m2 + delta2 * delta2 * (va * vb / total2);
        out
    }

    /// Sample variance of the unit-weight stream.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        self.m2 / (self.count as f64 - 1.0)
    }

    /// Standard error of the (self-normalized) mean.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        let n = self.count as f64;
        if self.unit_weights {
            return (self.m2 / (n * (n - 1.0))).max(0.0).sqrt();
        }
        let w = self.weight_sum();
        let shift = self.sq_mean - self.mean;
        let s = self.sq_m2 + self.sq_weight_sum.value() * shift * shift;
        (n / (n - 1.0) * s / (w * w)).max(0.0).sqrt()
    }

    pub fn finish(&self, mode: EstimatorMode, ci_level: f64) -> Result<EstimateResult> {
        if self.count == 0 {
            return Err(Error::Degenerate("no samples".into()));
        }
        if self.weight_sum() <= 0.0 {
            return Err(Error::Degenerate("all importance weights are zero".into()));
        }
        let z = normal_quantile_two_sided(ci_level)?;
        let se = self.std_error();
        Ok(EstimateResult {
            mean: self.mean,
            std_error: se,
            ci_low: self.mean - z * se,
            ci_high: self.mean + z * se,
            samples: self.count,
            mode,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub mode: EstimatorMode,
}

/// `z` with `P(|Z| ≤ z) = level` for a standard normal `Z`.
pub fn normal_quantile_two_sided(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(domain(format!("confidence level must lie in (0, 1), got {level}")));
    }
    // P(|Z| ≤ z) = P(1/2, z²/2).
    let ln_x = inv_reg_lower_inc_gamma_ln(0.5, level)?;
    Ok((2.0 * ln_x.exp()).sqrt())
}

/// State that can be combined across workers.
trait Mergeable: Clone + Send {
    fn empty() -> Self;
    fn merged(&self, other: &Self) -> Self;
}

impl Mergeable for MomentAccumulator {
    fn empty() -> Self {
        Self::new()
    }

    fn merged(&self, other: &Self) -> Self {
        self.merge(other)
    }
}

impl Mergeable for LogMeanAccumulator {
    fn empty() -> Self {
        Self::new()
    }

    fn merged(&self, other: &Self) -> Self {
        self.merge(other)
    }
}

/// Splits `samples` over `workers` and merges per-worker accumulators in order.
fn run_workers<A, F>(samples: u64, workers: usize, seed: RngState, slots: usize, work: F) -> Result<Vec<A>>
where
    A: Mergeable,
    F: Fn(RngState, u64, &mut [A]) -> Result<()> + Sync,
{
    if samples < 1 {
        return Err(domain("at least one sample is required"));
    }
    if workers < 1 {
        return Err(domain("at least one worker is required"));
    }
    let workers = workers.min(samples as usize).max(1);
    let base = samples / workers as u64;
    let extra = samples % workers as u64;
    let parts: Vec<Result<Vec<A>>> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let count = base + u64::from((w as u64) < extra);
            let mut accs = vec![A::empty(); slots];
            work(seed.for_worker(w), count, &mut accs)?;
            Ok(accs)
        })
        .collect();
    let mut total = vec![A::empty(); slots];
    for part in parts {
        let part = part?;
        for (t, a) in total.iter_mut().zip(&part) {
            *t = t.merged(a);
        }
    }
    Ok(total)
}

/// Draws `count` points and passes `σ_m(x)_q` for every `m` (or its log when
/// `log_scale`, which needs `q = ∞`) together with the point's weight to `visit`.
fn sweep_points<V>(query: &WidthQuery, state: RngState, count: u64, log_scale: bool, mut visit: V) -> Result<()>
where
    V: FnMut(&[f64], f64),
{
    let spec = *query.measure();
    let n = spec.n();
    let q = query.q();
    let ms = query.m_values();
    let max_m = *ms.last().expect("query has at least one m");
    debug_assert!(!log_scale || !q.is_finite());
    let mut sampler = PointSampler::new(spec);
    let mut rng = state.rng();
    let mut ln_x = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut errs = vec![0.0; ms.len()];
    for _ in 0..count {
        let w = sampler.draw_ln(&mut rng, &mut ln_x)?;
        if q.is_finite() {
            for (xi, li) in x.iter_mut().zip(&ln_x) {
                *xi = li.exp();
            }
            sort_non_increasing(&mut x);
            best_m_term_errors_sorted(&x, q, ms, &mut errs);
        } else {
            // Only the top max_m + 1 entries matter; exp is monotone.
            if max_m + 1 < n {
                ln_x.select_nth_unstable_by(max_m, |a, b| b.total_cmp(a));
            }
            sort_non_increasing(&mut ln_x[..=max_m]);
            for (e, &m) in errs.iter_mut().zip(ms) {
                *e = if log_scale { ln_x[m] } else { ln_x[m].exp() };
            }
        }
        visit(&errs, w);
    }
    Ok(())
}

/// Average of `σ_m(x)_q` under the query's measure for every requested `m`.
pub fn estimate_widths(
    query: &WidthQuery,
    samples: u64,
    seed: RngState,
    workers: usize,
) -> Result<BTreeMap<usize, EstimateResult>> {
    estimate_widths_with_level(query, samples, seed, workers, DEFAULT_CI_LEVEL)
}

pub fn estimate_widths_with_level(
    query: &WidthQuery,
    samples: u64,
    seed: RngState,
    workers: usize,
    ci_level: f64,
) -> Result<BTreeMap<usize, EstimateResult>> {
    normal_quantile_two_sided(ci_level)?;
    let ms = query.m_values();
    let weighted = query.measure().is_weighted();
    let accs = run_workers(samples, workers, seed, ms.len(), |state, count, accs: &mut [MomentAccumulator]| {
        sweep_points(query, state, count, false, |errs, w| {
            for (acc, &e) in accs.iter_mut().zip(errs) {
                if weighted {
                    acc.push_weighted(e, w);
                } else {
                    acc.push(e);
                }
            }
        })
    })?;

    let mode = if weighted { EstimatorMode::SelfNormalized } else { EstimatorMode::Plain };
    ms.iter()
        .zip(&accs)
        .map(|(&m, acc)| Ok((m, acc.finish(mode, ci_level)?)))
        .collect()
}

/// Mean of positive values kept as `ln`, for averages below the double range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMeanAccumulator {
    count: u64,
    shift: f64,
    s1: CompensatedSum,
    s2: CompensatedSum,
}

impl Default for LogMeanAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl LogMeanAccumulator {
    pub fn new() -> Self {
        Self { count: 0, shift: f64::NEG_INFINITY, s1: CompensatedSum::new(), s2: CompensatedSum::new() }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    fn rescale(&mut self, shift: f64) {
        if shift > self.shift {
            let f = (self.shift - shift).exp();
            self.s1.scale(f);
            self.s2.scale(f * f);
            self.shift = shift;
        }
    }

    /// Adds the value `exp(ln_x)`.
    #[inline]
    pub fn push(&mut self, ln_x: f64) {
        self.count += 1;
        if ln_x == f64::NEG_INFINITY {
            return;
        }
        self.rescale(ln_x);
        let e = (ln_x - self.shift).exp();
        self.s1.add(e);
        self.s2.add(e * e);
    }

    pub fn merge(&self, other: &Self) -> Self {
        let mut a = *self;
        let mut b = *other;
        if b.shift == f64::NEG_INFINITY {
            a.count += b.count;
            return a;
        }
        if a.shift == f64::NEG_INFINITY {
            b.count += a.count;
            return b;
        }
        let shift = a.shift.max(b.shift);
        a.rescale(shift);
        b.rescale(shift);
        a.count += b.count;
        a.s1.merge(&b.s1);
        a.s2.merge(&b.s2);
        a
    }

    /// `ln` of the sample mean.
    pub fn ln_mean(&self) -> f64 {
        self.shift + self.s1.value().ln() - (self.count as f64).ln()
    }

    /// Standard error of the mean divided by the mean.
    pub fn relative_std_error(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        let n = self.count as f64;
        let s1 = self.s1.value();
        ((n * self.s2.value() / (s1 * s1) - 1.0) / (n - 1.0)).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEstimate {
    pub ln_mean: f64,
    pub relative_std_error: f64,
    pub samples: u64,
}

/// Like [`estimate_widths`] for `q = ∞` and unweighted measures, but keeps
/// the means in log form.
pub fn estimate_log_widths(
    query: &WidthQuery,
    samples: u64,
    seed: RngState,
    workers: usize,
) -> Result<BTreeMap<usize, LogEstimate>> {
    if query.q().is_finite() || query.measure().is_weighted() {
        return Err(domain("log-scale estimates need q = inf and an unweighted measure"));
    }
    let ms = query.m_values();
    let accs = run_workers(samples, workers, seed, ms.len(), |state, count, accs: &mut [LogMeanAccumulator]| {
        sweep_points(query, state, count, true, |errs, _| {
            for (acc, &e) in accs.iter_mut().zip(errs) {
                acc.push(e);
            }
        })
    })?;
    ms.iter()
        .zip(&accs)
        .map(|(&m, acc)| {
            if acc.s1.value() <= 0.0 {
                return Err(Error::Degenerate(format!("all samples are zero for m = {m}")));
            }
            Ok((m, LogEstimate { ln_mean: acc.ln_mean(), relative_std_error: acc.relative_std_error(), samples: acc.count }))
        })
        .collect()
}

/// `E ω*_k` for the order statistics of `n` i.i.d. variates with density `∝ e^{-t^p}`.
/// Ranks are 1-based (`k = 1` is the maximum).
pub fn estimate_unnormalized_order_stats(
    p: PNorm,
    n: usize,
    ranks: &[usize],
    samples: u64,
    seed: RngState,
    workers: usize,
) -> Result<BTreeMap<usize, EstimateResult>> {
    if !p.is_finite() || n < 1 {
        return Err(domain("order statistics need finite p and n >= 1"));
    }
    if ranks.iter().any(|&k| k == 0 || k > n) {
        return Err(domain(format!("ranks must lie in [1, {n}]")));
    }
    let gamma = GammaSampler::new(1.0 / p.value())?;
    let inv_p = p.reciprocal();
    let accs = run_workers(samples, workers, seed, ranks.len(), |state, count, accs: &mut [MomentAccumulator]| {
        let mut rng = state.rng();
        let mut buf = vec![0.0; n];
        for _ in 0..count {
            for v in buf.iter_mut() {
                *v = gamma.sample_ln(&mut rng);
            }
            sort_non_increasing(&mut buf);
            for (acc, &k) in accs.iter_mut().zip(ranks) {
                acc.push((buf[k - 1] * inv_p).exp());
            }
        }
        Ok(())
    })?;
    ranks
        .iter()
        .zip(&accs)
        .map(|(&k, acc)| Ok((k, acc.finish(EstimatorMode::Plain, DEFAULT_CI_LEVEL)?)))
        .collect()
}

/// `E Π_i ω_i^β` for `n` i.i.d. variates with density `∝ e^{-t^p}`.
pub fn estimate_product_moment(
    p: PNorm,
    beta: f64,
    n: usize,
    samples: u64,
    seed: RngState,
    workers: usize,
) -> Result<EstimateResult> {
    if !p.is_finite() || n < 1 || !(beta > -1.0) {
        return Err(domain("product moment needs finite p, n >= 1 and beta > -1"));
    }
    let gamma = GammaSampler::new(1.0 / p.value())?;
    let scale = beta / p.value();
    let accs = run_workers(samples, workers, seed, 1, |state, count, accs: &mut [MomentAccumulator]| {
        let mut rng = state.rng();
        for _ in 0..count {
            let s: f64 = (0..n).map(|_| gamma.sample_ln(&mut rng)).sum();
            accs[0].push((scale * s).exp());
        }
        Ok(())
    })?;
    accs[0].finish(EstimatorMode::Plain, DEFAULT_CI_LEVEL)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCheck {
    pub ratio: f64,
    pub z_score: f64,
    pub volume: EstimateResult,
    pub cone: EstimateResult,
}

/// Volume-to-cone ratio of the average width, compared with `n/(n+1)`.
/// The two estimates use streams `seed.stream_id` (cone) and `seed.stream_id + 1` (volume).
pub fn ratio_check_prop10(
    p: PNorm,
    q: PNorm,
    n: usize,
    m: usize,
    samples: u64,
    seed: RngState,
    workers: usize,
) -> Result<RatioCheck> {
    let cone_q = WidthQuery::new(q, vec![m], MeasureSpec::cone(p, n)?)?;
    let vol_q = WidthQuery::new(q, vec![m], MeasureSpec::volume(p, n)?)?;
    let cone = estimate_widths(&cone_q, samples, seed, workers)?[&m];
    let vol_seed = RngState::new(seed.seed, seed.stream_id.wrapping_add(1));
    let volume = estimate_widths(&vol_q, samples, vol_seed, workers)?[&m];
    if !(cone.mean > 4.0 * cone.std_error) || cone.mean <= 0.0 {
        return Err(Error::Degenerate(format!(
            "cone estimate {} ± {} is indistinguishable from zero",
            cone.mean, cone.std_error
        )));
    }
    let ratio = volume.mean / cone.mean;
    let rel = ((volume.std_error / volume.mean).powi(2) + (cone.std_error / cone.mean).powi(2)).sqrt();
    let target = n as f64 / (n as f64 + 1.0);
    let se = ratio * rel;
    let z_score = if se > 0.0 {
        (ratio - target) / se
    } else if (ratio - target).abs() <= 4.0 * f64::EPSILON {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(RatioCheck { ratio, z_score, volume, cone })
}
