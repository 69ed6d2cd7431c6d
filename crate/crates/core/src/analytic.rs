//! Closed-form and quadrature-based reference values.
//!
//! Shape functions of the asymptotic bounds are returned with constant 1;
//! the bounds only hold up to unknown constants depending on `p`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_with_breakpoints, QuadOptions};
use crate::sparse_approx::PNorm;
use crate::specfun::{ln_omega_from_tail, log_gamma, IncGammaProfile, EULER_GAMMA};

/// `Γ(n/p) / Γ(n/p + 1/p)`: converts `E ω*_m` for i.i.d. variates with density
/// `∝ e^{-t^p}` into the average of `x*_m` under the cone measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeFactor {
    pub p: PNorm,
    pub n: usize,
    pub value: f64,
}

pub fn bridge_lemma1(p: PNorm, n: usize) -> Result<BridgeFactor> {
    if !p.is_finite() || n < 2 {
        return Err(domain(format!("bridge factor needs finite p and n >= 2, got p={p}, n={n}")));
    }
    let a = n as f64 / p.value();
    let value = (log_gamma(a)? - log_gamma(a + p.reciprocal())?).exp();
    Ok(BridgeFactor { p, n, value })
}

/// `Γ(n(β+1)/p) / Γ(n(β+1)/p + 1/p)`.
pub fn lemma15_factor(p: PNorm, n: usize, beta: f64) -> Result<f64> {
    if !p.is_finite() || n < 2 || !(beta > -1.0) {
        return Err(domain("need finite p, n >= 2 and beta > -1"));
    }
    let a = n as f64 * (beta + 1.0) / p.value();
    Ok((log_gamma(a)? - log_gamma(a + p.reciprocal())?).exp())
}

/// `ln E Π ω_i^β = n [ln Γ((β+1)/p) - ln Γ(1/p)]` for i.i.d. `ω_i` with density `(p/Γ(1/p)) e^{-t^p}`.
pub fn lemma15_log_product_moment(p: PNorm, beta: f64, n: usize) -> Result<f64> {
    if !p.is_finite() || n < 1 || !(beta > -1.0) {
        return Err(domain("need finite p, n >= 1 and beta > -1"));
    }
    let inv_p = p.reciprocal();
    Ok(n as f64 * (log_gamma((beta + 1.0) * inv_p)? - log_gamma(inv_p)?))
}

fn check_thm17_domain(p: PNorm, n: usize, m: usize) -> Result<()> {
    if !p.is_finite() {
        return Err(domain("p must be finite"));
    }
    if n < 2 {
        return Err(domain(format!("n must be at least 2, got {n}")));
    }
    if m < 1 || m > n {
        return Err(domain(format!("m must lie in [1, {n}], got {m}")));
    }
    Ok(())
}

/// `ln σ_{m-1}^{p,∞}(θ_{p,p/n-1})`, the log of the mean of the m-th largest
/// coordinate under the sparse tensor measure.
///
/// With `G_i ~ Gamma(1/n)`, `Σ G_i ~ Gamma(1)` is independent of the
/// normalized point, so `E x*_m = E (G*_m)^{1/p} / Γ(1 + 1/p)`. The order
/// statistic is integrated against the Beta density of `y = P(1/n, G*_m)`,
/// in the variable `t = 1 - y`.
pub fn theorem17_log_quadrature(p: PNorm, n: usize, m: usize) -> Result<f64> {
    check_thm17_domain(p, n, m)?;
    let profile = IncGammaProfile::new(n)?;
    let inv_p = p.reciprocal();
    let (nf, mf) = (n as f64, m as f64);
    let log_integrand = |t: f64| -> f64 {
        let ln_omega = match ln_omega_from_tail(&profile, t) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        let mut g = inv_p * ln_omega;
        if n > m {
            g += (nf - mf) * (-t).ln_1p();
        }
        if m > 1 {
            g += (mf - 1.0) * t.ln();
        }
        g
    };

    let mut points = vec![0.0, 1.0, (-1.0f64).exp() / profile.gamma_n()];
    points.extend([0.25, 1.0, 4.0].iter().map(|c| c * mf / nf));
    points.retain(|t| (0.0..=1.0).contains(t));
    points.sort_by(f64::total_cmp);
    points.dedup();

    // Shift by the approximate maximum so the integrand stays in range.
    let shift = (1..400)
        .flat_map(|k| {
            let t = 10f64.powf(-16.0 + 16.0 * k as f64 / 400.0);
            [t, 1.0 - t]
        })
        .chain(points[1..points.len() - 1].iter().copied())
        .map(log_integrand)
        .filter(|g| g.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(Error::Numerical {
            routine: "theorem17_quadrature",
            detail: format!("integrand not finite anywhere on the grid for p={p}, n={n}, m={m}"),
        });
    }

    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 4000 };
    let r = integrate_with_breakpoints(|t| (log_integrand(t) - shift).exp(), &points, opts).map_err(|e| match e {
        Error::Numerical { detail, .. } => Error::Numerical {
            routine: "theorem17_quadrature",
            detail: format!("p={p}, n={n}, m={m}: {detail}"),
        },
        other => other,
    })?;
    if !(r.value > 0.0) {
        return Err(Error::Numerical {
            routine: "theorem17_quadrature",
            detail: format!("non-positive integral {} for p={p}, n={n}, m={m}", r.value),
        });
    }
    let ln_prefactor = log_gamma(nf + 1.0)? - log_gamma(mf)? - log_gamma(nf - mf + 1.0)? - log_gamma(1.0 + inv_p)?;
    Ok(ln_prefactor + shift + r.value.ln())
}

/// `σ_{m-1}^{p,∞}(θ_{p,p/n-1})` by adaptive quadrature. Underflows to 0 for
/// `m` close to a large `n`; use [`theorem17_log_quadrature`] there.
pub fn theorem17_quadrature(p: PNorm, n: usize, m: usize) -> Result<f64> {
    Ok(theorem17_log_quadrature(p, n, m)?.exp())
}

/// Logs of the lower and upper Gamma-ratio envelopes for the quadrature value.
pub fn theorem17_log_bounds(p: PNorm, n: usize, m: usize) -> Result<(f64, f64)> {
    check_thm17_domain(p, n, m)?;
    let (nf, mf) = (n as f64, m as f64);
    let a = nf / p.value();
    let ln_falling = log_gamma(nf + 1.0)? - log_gamma(nf - mf + 1.0)?;
    let ln_ratio = log_gamma(a + nf - mf + 1.0)? - log_gamma(a + nf + 1.0)?;
    let ln_extra = -log_gamma(mf + 1.0)? + mf * (-1.0 - log_gamma(1.0 / nf)?);
    let hi = ln_ratio.max(ln_extra);
    let ln_sum = hi + ((ln_ratio - hi).exp() + (ln_extra - hi).exp()).ln();
    Ok((ln_falling + ln_ratio, ln_falling + ln_sum))
}

/// Lower and upper envelopes with both constants set to 1.
pub fn theorem17_bounds(p: PNorm, n: usize, m: usize) -> Result<(f64, f64)> {
    let (lo, hi) = theorem17_log_bounds(p, n, m)?;
    Ok((lo.exp(), hi.exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    /// `[log(en/(m+1))/n]^{1/p}`, upper bound for the cone measure, `q = ∞`.
    Thm6Upper,
    /// Same shape as a lower bound, only for `m ≤ n/20`.
    Thm6Lower,
    /// `[log(n+1)/n]^{1/p-1/q}` for the surface measure, `m = 0`.
    Thm9Upper,
    /// `n^{1/q-1/p}` for the cone measure, `m = 0`, `q < ∞`.
    Prop12,
    /// `(m+1)^{1/q-1/p}`, the worst case over the unit ball.
    Eq1,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 5] = [Self::Thm6Upper, Self::Thm6Lower, Self::Thm9Upper, Self::Prop12, Self::Eq1];

    pub fn name(self) -> &'static str {
        match self {
            Self::Thm6Upper => "thm6-upper",
            Self::Thm6Lower => "thm6-lower",
            Self::Thm9Upper => "thm9-upper",
            Self::Prop12 => "prop12",
            Self::Eq1 => "eq1",
        }
    }
}

impl fmt::Display for EnvelopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvelopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| domain(format!("unknown envelope '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEnvelope {
    pub kind: EnvelopeKind,
    pub p: PNorm,
    pub q: PNorm,
    pub constant: f64,
}

impl BoundEnvelope {
    pub fn new(kind: EnvelopeKind, p: PNorm, q: PNorm, constant: f64) -> Result<Self> {
        if !(constant > 0.0) || !constant.is_finite() {
            return Err(domain(format!("envelope constant must be positive, got {constant}")));
        }
        if p > q {
            return Err(domain(format!("need p <= q, got p={p}, q={q}")));
        }
        Ok(Self { kind, p, q, constant })
    }

    pub fn evaluate(&self, n: usize, m: usize) -> Result<f64> {
        Ok(self.constant * bound_envelope(self.kind, self.p, self.q, n, m)?)
    }
}

/// Shape function of the chosen bound (constant 1).
pub fn bound_envelope(kind: EnvelopeKind, p: PNorm, q: PNorm, n: usize, m: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("n must be at least 2, got {n}")));
    }
    if m > n - 1 {
        return Err(domain(format!("m must lie in [0, {}], got {m}", n - 1)));
    }
    if p > q {
        return Err(domain(format!("need p <= q, got p={p}, q={q}")));
    }
    let (nf, mf) = (n as f64, m as f64);
    let inv_p = p.reciprocal();
    let inv_q = q.reciprocal();
    match kind {
        EnvelopeKind::Thm6Upper | EnvelopeKind::Thm6Lower => {
            if q.is_finite() {
                return Err(domain("the thm6 envelopes need q = inf"));
            }
            if kind == EnvelopeKind::Thm6Lower && 20 * m > n {
                return Err(domain(format!("lower envelope is only used for m <= n/20, got m={m}, n={n}")));
            }
            Ok(((1.0 + (nf / (mf + 1.0)).ln()) / nf).powf(inv_p))
        }
        EnvelopeKind::Thm9Upper => {
            if m != 0 || !p.is_finite() {
                return Err(domain("the surface envelope needs m = 0 and finite p"));
            }
            Ok(((nf + 1.0).ln() / nf).powf(inv_p - inv_q))
        }
        EnvelopeKind::Prop12 => {
            if m != 0 || !q.is_finite() {
                return Err(domain("the prop12 envelope needs m = 0 and finite q"));
            }
            Ok(nf.powf(inv_q - inv_p))
        }
        EnvelopeKind::Eq1 => Ok((mf + 1.0).powf(inv_q - inv_p)),
    }
}

/// `e^{-C}` with Euler's constant `C`.
pub fn limit_constant_lemma17() -> f64 {
    (-EULER_GAMMA).exp()
}

/// `(Γ(1/n)/n)^n`, evaluated as `exp(n ln Γ(1 + 1/n))`.
pub fn lemma17_sequence(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(domain("n must be positive"));
    }
    let nf = n as f64;
    Ok((nf * log_gamma(1.0 + 1.0 / nf)?).exp())
}
