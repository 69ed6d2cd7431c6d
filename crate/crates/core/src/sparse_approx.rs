//! Quasi-norms, non-increasing rearrangement and best m-term approximation
//! error of vectors in the positive orthant.
//!
//! For `x ∈ R^n_+` the best m-term error in `ℓ_q` is realized by keeping the
//! `m` largest entries, so `σ_m(x)_q` is the `ℓ_q` quasi-norm of the sorted
//! tail `(x*_{m+1}, …, x*_n)`.

use std::fmt;
use std::str::FromStr;

use crate::compensated::CompensatedSum;
use crate::error::{domain, Error, Result};

/// Tolerance on `|‖x‖_p - 1|` accepted for points of the positive unit sphere.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// An exponent `p ∈ (0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PNorm(f64);

impl PNorm {
    pub const INFINITY: PNorm = PNorm(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 {
            Ok(Self(value))
        } else {
            Err(domain(format!("exponent must be positive or infinite, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        if self.0.is_finite() {
            1.0 / self.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_finite() {
            write!(f, "{}", self.0)
        } else {
            f.write_str("inf")
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    /// Accepts decimals, fractions such as `1/2`, and `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Self::INFINITY),
            _ => {}
        }
        let value = match s.split_once('/') {
            Some((num, den)) => {
                let num: f64 = num.trim().parse().map_err(|_| domain(format!("bad exponent '{s}'")))?;
                let den: f64 = den.trim().parse().map_err(|_| domain(format!("bad exponent '{s}'")))?;
                num / den
            }
            None => s.parse().map_err(|_| domain(format!("bad exponent '{s}'")))?,
        };
        if !value.is_finite() {
            return Err(domain(format!("bad exponent '{s}'")));
        }
        Self::new(value)
    }
}

/// A finite vector with nonnegative finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveVector(Vec<f64>);

impl PositiveVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(domain("vector must have at least one entry"));
        }
        if let Some(bad) = entries.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(domain(format!("entries must be finite and nonnegative, found {bad}")));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|x| c * x).collect())
    }
}

/// A point of the positive part of the unit `ℓ_p` sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    vector: PositiveVector,
    p: PNorm,
}

impl SimplexPoint {
    pub fn new(vector: PositiveVector, p: PNorm) -> Result<Self> {
        let norm = quasi_norm(&vector, p);
        if (norm - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(domain(format!("point has ℓ_{p} norm {norm}, expected 1")));
        }
        Ok(Self { vector, p })
    }

    /// Rescales a nonzero vector onto the sphere.
    pub fn normalize(vector: PositiveVector, p: PNorm) -> Result<Self> {
        let norm = quasi_norm(&vector, p);
        if norm == 0.0 {
            return Err(domain("cannot normalize the zero vector"));
        }
        let vector = vector.scaled(1.0 / norm)?;
        Self::new(vector, p)
    }

    pub fn vector(&self) -> &PositiveVector {
        &self.vector
    }

    pub fn p(&self) -> PNorm {
        self.p
    }
}

/// `(Σ x_j^q)^{1/q}`, or `max_j x_j` for `q = ∞`.
pub fn quasi_norm(x: &PositiveVector, q: PNorm) -> f64 {
    quasi_norm_slice(x.entries(), q)
}

pub(crate) fn quasi_norm_slice(x: &[f64], q: PNorm) -> f64 {
    let max = x.iter().copied().fold(0.0, f64::max);
    if max == 0.0 || !q.is_finite() {
        return max;
    }
    let q = q.value();
    // Scaling by the maximum keeps x^q in range for very small or large q.
    let s: CompensatedSum = x.iter().map(|v| (v / max).powf(q)).collect();
    max * s.value().powf(1.0 / q)
}

/// Entries sorted non-increasingly; ties keep their original order.
pub fn rearrange(x: &PositiveVector) -> PositiveVector {
    let mut v = x.entries().to_vec();
    sort_non_increasing(&mut v);
    PositiveVector(v)
}

pub(crate) fn sort_non_increasing(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// `σ_m(x)_q`: the `ℓ_q` quasi-norm of the rearrangement with its first `m` entries removed.
pub fn best_m_term_error(x: &PositiveVector, m: usize, q: PNorm) -> Result<f64> {
    let n = x.len();
    if m > n {
        return Err(domain(format!("m = {m} exceeds the dimension {n}")));
    }
    let sorted = rearrange(x);
    let tail = &sorted.entries()[m..];
    if tail.is_empty() {
        return Ok(0.0);
    }
    if !q.is_finite() {
        return Ok(tail[0]);
    }
    let max = tail[0];
    if max == 0.0 {
        return Ok(0.0);
    }
    // Largest terms first.
    let s: CompensatedSum = tail.iter().map(|v| (v / max).powf(q.value())).collect();
    Ok(max * s.value().powf(1.0 / q.value()))
}

/// Evaluates `σ_m(x)_q` for several `m` at once from an already sorted
/// (non-increasing) slice. `out[i]` receives the error for `ms[i]`; every
/// `ms[i]` must be at most `sorted.len()`.
pub(crate) fn best_m_term_errors_sorted(sorted: &[f64], q: PNorm, ms: &[usize], out: &mut [f64]) {
    let n = sorted.len();
    debug_assert_eq!(ms.len(), out.len());
    if !q.is_finite() {
        for (o, &m) in out.iter_mut().zip(ms) {
            *o = if m < n { sorted[m] } else { 0.0 };
        }
        return;
    }
    let max = sorted.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        out.fill(0.0);
        return;
    }
    let q = q.value();
    // Suffix sums, smallest terms first; record each requested cut.
    let mut tail = CompensatedSum::new();
    let mut cut = n;
    let mut order: Vec<usize> = (0..ms.len()).collect();
    order.sort_by(|&a, &b| ms[b].cmp(&ms[a]));
    for idx in order {
        let m = ms[idx];
        while cut > m {
            cut -= 1;
            tail.add((sorted[cut] / max).powf(q));
        }
        out[idx] = max * tail.value().powf(1.0 / q);
    }
}

/// Two-sided bound `2^{-1/p}(m+1)^{1/q-1/p} ≤ σ_m^{p,q} ≤ (m+1)^{1/q-1/p}`
/// on the worst-case best m-term error over the unit `ℓ_p` ball.
pub fn width_bounds(p: PNorm, q: PNorm, m: usize) -> Result<(f64, f64)> {
    if p > q {
        return Err(domain(format!("width bounds need p <= q, got p={p}, q={q}")));
    }
    let upper = (m as f64 + 1.0).powf(q.reciprocal() - p.reciprocal());
    let lower = 2f64.powf(-p.reciprocal()) * upper;
    Ok((lower, upper))
}

/// The vector `(m+1)^{-1/p} (e_1 + … + e_{m+1})` in dimension `n`, on which
/// the lower width bound is attained up to the factor `2^{-1/p}`.
pub fn extremal_witness(p: PNorm, m: usize, n: usize) -> Result<PositiveVector> {
    if !p.is_finite() {
        return Err(domain("the witness needs a finite p"));
    }
    if m + 1 > n {
        return Err(domain(format!("witness needs m + 1 <= n, got m={m}, n={n}")));
    }
    let level = (m as f64 + 1.0).powf(-p.reciprocal());
    let mut v = vec![0.0; n];
    v[..=m].fill(level);
    PositiveVector::new(v)
}
