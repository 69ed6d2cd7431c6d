//! Random points on the positive part of the `ℓ_p` unit sphere.
//!
//! Every measure is realized through normalized i.i.d. variates: with
//! `G_i ~ Gamma(s)` the point `x_i = (G_i / Σ_j G_j)^{1/p}` follows the cone
//! measure for `s = 1/p` and the tensor measure `θ_{p,β}` for `s = (β+1)/p`.
//! Coordinates are produced in log form so that shapes as small as `1/n`
//! (where most `G_i` underflow) stay exact.
//!
//! Streams are ChaCha8 keyed by `seed` with the 64-bit stream selector set to
//! `stream_id`. Output is reproducible bit for bit within a release.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::sparse_approx::{PNorm, PositiveVector};

pub type StreamRng = ChaCha8Rng;

/// Redraw cap for surface points whose weight is not finite.
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngState {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngState {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// State for worker `index`; workers occupy the high 32 bits of the stream selector.
    pub fn for_worker(&self, index: usize) -> Self {
        Self {
            seed: self.seed,
            stream_id: self.stream_id.wrapping_add((index as u64) << 32),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureKind {
    Cone,
    Volume,
    Surface,
    Tensor { beta: f64 },
    /// The tensor measure with `β = p/n − 1`.
    TensorSparse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSpec {
    kind: MeasureKind,
    p: PNorm,
    n: usize,
}

impl MeasureSpec {
    pub fn new(kind: MeasureKind, p: PNorm, n: usize) -> Result<Self> {
        if !p.is_finite() {
            return Err(domain("sampling needs a finite p"));
        }
        if n < 2 {
            return Err(domain(format!("dimension must be at least 2, got {n}")));
        }
        if let MeasureKind::Tensor { beta } = kind {
            if !(beta > -1.0) || !beta.is_finite() {
                return Err(domain(format!("tensor measure needs beta > -1, got {beta}")));
            }
        }
        Ok(Self { kind, p, n })
    }

    pub fn cone(p: PNorm, n: usize) -> Result<Self> {
        Self::new(MeasureKind::Cone, p, n)
    }

    pub fn volume(p: PNorm, n: usize) -> Result<Self> {
        Self::new(MeasureKind::Volume, p, n)
    }

    pub fn surface(p: PNorm, n: usize) -> Result<Self> {
        Self::new(MeasureKind::Surface, p, n)
    }

    pub fn tensor(p: PNorm, n: usize, beta: f64) -> Result<Self> {
        Self::new(MeasureKind::Tensor { beta }, p, n)
    }

    pub fn tensor_sparse(p: PNorm, n: usize) -> Result<Self> {
        Self::new(MeasureKind::TensorSparse, p, n)
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn p(&self) -> PNorm {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `β` of the tensor measure; 0 for the cone-based kinds.
    pub fn beta(&self) -> f64 {
        match self.kind {
            MeasureKind::Tensor { beta } => beta,
            MeasureKind::TensorSparse => self.p.value() / self.n as f64 - 1.0,
            _ => 0.0,
        }
    }

    /// Shape of the gamma variates behind the point.
    pub fn gamma_shape(&self) -> f64 {
        match self.kind {
            MeasureKind::TensorSparse => 1.0 / self.n as f64,
            _ => (self.beta() + 1.0) / self.p.value(),
        }
    }

    /// Whether points lie on the sphere (everything except the volume measure).
    pub fn on_sphere(&self) -> bool {
        !matches!(self.kind, MeasureKind::Volume)
    }

    pub fn is_weighted(&self) -> bool {
        matches!(self.kind, MeasureKind::Surface)
    }

    /// Tag used in result tables.
    pub fn label(&self) -> String {
        match self.kind {
            MeasureKind::Cone => "cone".into(),
            MeasureKind::Volume => "volume".into(),
            MeasureKind::Surface => "surface".into(),
            MeasureKind::Tensor { beta } => format!("tensor:{beta}"),
            MeasureKind::TensorSparse => "tensor-sparse".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    pub point: PositiveVector,
    pub weight: f64,
}

/// Marsaglia–Tsang sampler returning `ln G`, with `G_a = G_{a+1} U^{1/a}` for `a < 1`.
#[derive(Debug, Clone, Copy)]
pub struct GammaSampler {
    d: f64,
    c: f64,
    ln_d: f64,
    /// `1/a` when the shape is boosted, else 0.
    boost: f64,
}

impl GammaSampler {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(domain(format!("gamma shape must be positive and finite, got {shape}")));
        }
        let (base, boost) = if shape < 1.0 { (shape + 1.0, 1.0 / shape) } else { (shape, 0.0) };
        let d = base - 1.0 / 3.0;
        Ok(Self { d, c: 1.0 / (9.0 * d).sqrt(), ln_d: d.ln(), boost })
    }

    #[inline]
    pub fn sample_ln<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let ln_g = loop {
            let x: f64 = rng.sample(StandardNormal);
            let t = 1.0 + self.c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u: f64 = rng.sample(Open01);
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                break self.ln_d + v.ln();
            }
            let ln_v = v.ln();
            if u.ln() < 0.5 * x2 + self.d * (1.0 - v + ln_v) {
                break self.ln_d + ln_v;
            }
        };
        if self.boost > 0.0 {
            let u: f64 = rng.sample(Open01);
            ln_g + u.ln() * self.boost
        } else {
            ln_g
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_ln(rng).exp()
    }
}

/// One `Gamma(shape)` variate in log form.
pub fn sample_ln_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    Ok(GammaSampler::new(shape)?.sample_ln(rng))
}

/// One `Gamma(shape)` variate. May round to 0 for very small shapes.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    Ok(GammaSampler::new(shape)?.sample(rng))
}

/// One variate with density proportional to `t^β e^{-t^p}` on `(0, ∞)`.
pub fn sample_gen_gamma<R: Rng + ?Sized>(p: PNorm, beta: f64, rng: &mut R) -> Result<f64> {
    if !p.is_finite() {
        return Err(domain("generalized gamma needs a finite p"));
    }
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(domain(format!("beta must exceed -1, got {beta}")));
    }
    let g = GammaSampler::new((beta + 1.0) / p.value())?;
    Ok((g.sample_ln(rng) / p.value()).exp())
}

/// Reusable point generator for one measure.
#[derive(Debug, Clone)]
pub struct PointSampler {
    spec: MeasureSpec,
    gamma: GammaSampler,
    inv_p: f64,
    ln_buf: Vec<f64>,
    redraws: u64,
}

impl PointSampler {
    pub fn new(spec: MeasureSpec) -> Self {
        let gamma = GammaSampler::new(spec.gamma_shape()).expect("validated spec has a positive shape");
        Self { spec, gamma, inv_p: 1.0 / spec.p().value(), ln_buf: vec![0.0; spec.n()], redraws: 0 }
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    /// Surface points discarded because their weight was not finite.
    pub fn redraws(&self) -> u64 {
        self.redraws
    }

    /// Writes the log-coordinates of one point into `ln_x` and returns its weight.
    pub fn draw_ln<R: Rng + ?Sized>(&mut self, rng: &mut R, ln_x: &mut [f64]) -> Result<f64> {
        debug_assert_eq!(ln_x.len(), self.spec.n());
        for attempt in 0..=MAX_REDRAWS {
            self.draw_cone_ln(rng, ln_x);
            match self.spec.kind() {
                MeasureKind::Volume => {
                    let u: f64 = rng.sample(Open01);
                    let ln_r = u.ln() / self.spec.n() as f64;
                    ln_x.iter_mut().for_each(|v| *v += ln_r);
                    return Ok(1.0);
                }
                MeasureKind::Surface => {
                    let w = surface_weight_from_ln(self.spec.p().value(), ln_x);
                    if w.is_finite() && w > 0.0 && ln_x.iter().all(|v| *v > f64::NEG_INFINITY) {
                        return Ok(w);
                    }
                    if attempt < MAX_REDRAWS {
                        self.redraws += 1;
                    }
                }
                _ => return Ok(1.0),
            }
        }
        Err(Error::Degenerate(format!("no finite surface weight after {MAX_REDRAWS} redraws")))
    }

    /// Writes the coordinates of one point into `x` and returns its weight.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R, x: &mut [f64]) -> Result<f64> {
        let mut buf = std::mem::take(&mut self.ln_buf);
        let w = self.draw_ln(rng, &mut buf);
        for (xi, li) in x.iter_mut().zip(&buf) {
            *xi = li.exp();
        }
        self.ln_buf = buf;
        w
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<WeightedSample> {
        let mut x = vec![0.0; self.spec.n()];
        let weight = self.draw(rng, &mut x)?;
        Ok(WeightedSample { point: PositiveVector::new(x)?, weight })
    }

    fn draw_cone_ln<R: Rng + ?Sized>(&mut self, rng: &mut R, ln_x: &mut [f64]) {
        let mut max = f64::NEG_INFINITY;
        for v in ln_x.iter_mut() {
            *v = self.gamma.sample_ln(rng);
            max = max.max(*v);
        }
        let s: f64 = ln_x.iter().map(|v| (v - max).exp()).sum();
        let lse = max + s.ln();
        for v in ln_x.iter_mut() {
            *v = (*v - lse) * self.inv_p;
        }
    }
}

/// `(Σ x_i^{2p-2})^{1/2}` from log-coordinates.
pub(crate) fn surface_weight_from_ln(p: f64, ln_x: &[f64]) -> f64 {
    let e = 2.0 * p - 2.0;
    if e == 0.0 {
        return (ln_x.len() as f64).sqrt();
    }
    let max = ln_x.iter().map(|v| e * v).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = ln_x.iter().map(|v| (e * v - max).exp()).sum();
    (0.5 * (max + s.ln())).exp()
}

fn sample_kind<R: Rng + ?Sized>(spec: &MeasureSpec, rng: &mut R, ok: bool, want: &str) -> Result<WeightedSample> {
    if !ok {
        return Err(domain(format!("expected a {want} measure, got {}", spec.label())));
    }
    PointSampler::new(*spec).sample(rng)
}

pub fn sample_cone<R: Rng + ?Sized>(spec: &MeasureSpec, rng: &mut R) -> Result<WeightedSample> {
    sample_kind(spec, rng, matches!(spec.kind(), MeasureKind::Cone), "cone")
}

pub fn sample_volume<R: Rng + ?Sized>(spec: &MeasureSpec, rng: &mut R) -> Result<WeightedSample> {
    sample_kind(spec, rng, matches!(spec.kind(), MeasureKind::Volume), "volume")
}

pub fn sample_tensor<R: Rng + ?Sized>(spec: &MeasureSpec, rng: &mut R) -> Result<WeightedSample> {
    let ok = matches!(spec.kind(), MeasureKind::Tensor { .. } | MeasureKind::TensorSparse);
    sample_kind(spec, rng, ok, "tensor")
}

pub fn sample_surface<R: Rng + ?Sized>(spec: &MeasureSpec, rng: &mut R) -> Result<WeightedSample> {
    sample_kind(spec, rng, matches!(spec.kind(), MeasureKind::Surface), "surface")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};
    use crate::sparse_approx::{quasi_norm, rearrange};
    use crate::specfun::{digamma, log_gamma};
    use std::f64::consts::PI;

    fn pn(v: f64) -> PNorm {
        PNorm::new(v).unwrap()
    }

    /// Mean and standard error of the mean.
    fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
        let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
        for x in xs {
            n += 1.0;
            let d = x - mean;
            mean += d / n;
            m2 += d * (x - mean);
        }
        (mean, (m2 / (n - 1.0) / n).sqrt())
    }

    fn gamma_ratio(a: f64, b: f64) -> f64 {
        (log_gamma(a).unwrap() - log_gamma(b).unwrap()).exp()
    }

    #[test]
    fn gamma_rejects_bad_shape() {
        let mut rng = RngState::new(1, 0).rng();
        for s in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(sample_gamma(s, &mut rng), Err(Error::Domain(_))));
        }
        assert!(sample_gen_gamma(pn(1.0), -1.0, &mut rng).is_err());
        assert!(sample_gen_gamma(PNorm::INFINITY, 0.0, &mut rng).is_err());
    }

    #[test]
    fn gamma_moments() {
        let mut rng = RngState::new(11, 0).rng();
        let n = 1_000_000;
        let g = GammaSampler::new(1.0).unwrap();
        let (m, _) = mean_se((0..n).map(|_| g.sample(&mut rng)));
        assert!((m - 1.0).abs() < 0.004, "shape 1 mean {m}");

        let g = GammaSampler::new(0.02).unwrap();
        let (m, _) = mean_se((0..n).map(|_| g.sample(&mut rng)));
        assert!((m - 0.02).abs() < 3.0 * 0.02f64.sqrt() / 1e3, "shape 0.02 mean {m}");

        let a = 2.5;
        let g = GammaSampler::new(a).unwrap();
        let (m, se) = mean_se((0..n).map(|_| g.sample(&mut rng).powi(2)));
        assert!((m - a * (a + 1.0)).abs() < 3.0 * se, "shape 2.5 second moment {m} ± {se}");
    }

    #[test]
    fn log_form_survives_tiny_shapes() {
        let mut rng = RngState::new(3, 0).rng();
        let g = GammaSampler::new(1e-3).unwrap();
        let draws: Vec<f64> = (0..10_000).map(|_| g.sample_ln(&mut rng)).collect();
        assert!(draws.iter().all(|v| v.is_finite()));
        // About half of the variates lie below the double range; E ln G = ψ(a).
        assert!(draws.iter().filter(|v| **v < -745.0).count() > 4000);
        let (m, se) = mean_se(draws.iter().copied());
        assert!((m - digamma(1e-3).unwrap()).abs() < 4.0 * se, "{m} ± {se}");
    }

    #[test]
    fn gen_gamma_moments() {
        let n = 1_000_000;
        let cases = [(1.0, 0.0, 1), (2.0, 0.0, 2), (0.5, -0.9, 1)];
        for (i, (p, beta, k)) in cases.into_iter().enumerate() {
            let mut rng = RngState::new(5, i as u64).rng();
            let (m, se) = mean_se((0..n).map(|_| sample_gen_gamma(pn(p), beta, &mut rng).unwrap().powi(k)));
            let exact = gamma_ratio((beta + 1.0 + k as f64) / p, (beta + 1.0) / p);
            assert!((m - exact).abs() < 3.0 * se, "p={p} beta={beta} k={k}: {m} vs {exact} ± {se}");
        }
    }

    #[test]
    fn spec_validation() {
        assert!(MeasureSpec::cone(pn(1.0), 1).is_err());
        assert!(MeasureSpec::cone(PNorm::INFINITY, 3).is_err());
        assert!(MeasureSpec::tensor(pn(1.0), 3, -1.0).is_err());
        assert!(MeasureSpec::tensor(pn(1.0), 3, -0.5).is_ok());
        let s = MeasureSpec::tensor_sparse(pn(2.0), 100).unwrap();
        assert!((s.beta() + 0.98).abs() < 1e-15);
        assert_eq!(s.gamma_shape(), 0.01);
        assert_eq!(s.label(), "tensor-sparse");
        assert_eq!(MeasureSpec::tensor(pn(1.0), 3, 0.5).unwrap().label(), "tensor:0.5");
        let mut rng = RngState::new(1, 0).rng();
        assert!(sample_cone(&s, &mut rng).is_err());
        assert!(sample_tensor(&s, &mut rng).is_ok());
    }

    #[test]
    fn cone_quarter_circle() {
        let spec = MeasureSpec::cone(pn(2.0), 2).unwrap();
        let mut sampler = PointSampler::new(spec);
        let mut rng = RngState::new(7, 0).rng();
        let mut x = [0.0; 2];
        let pts: Vec<[f64; 2]> = (0..1_000_000)
            .map(|_| {
                sampler.draw(&mut rng, &mut x).unwrap();
                x
            })
            .collect();
        let (m1, se1) = mean_se(pts.iter().map(|x| x[0]));
        assert!((m1 - 2.0 / PI).abs() < 3.0 * se1, "E x1 = {m1}");
        let (mx, sex) = mean_se(pts.iter().map(|x| x[0].max(x[1])));
        assert!((mx - 2.0 * 2f64.sqrt() / PI).abs() < 3.0 * sex, "E max = {mx}");
    }

    #[test]
    fn points_are_normalized() {
        let mut rng = RngState::new(9, 0).rng();
        for p in [0.5, 1.0, 2.0, 3.7] {
            for n in [2, 10, 1000] {
                let specs = [
                    MeasureSpec::cone(pn(p), n).unwrap(),
                    MeasureSpec::surface(pn(p), n).unwrap(),
                    MeasureSpec::tensor(pn(p), n, 1.5).unwrap(),
                    MeasureSpec::tensor_sparse(pn(p), n).unwrap(),
                ];
                for spec in specs {
                    let mut s = PointSampler::new(spec);
                    for _ in 0..50 {
                        let pt = s.sample(&mut rng).unwrap();
                        let norm = quasi_norm(&pt.point, pn(p));
                        assert!((norm - 1.0).abs() <= 1e-9, "{} p={p} n={n}: {norm}", spec.label());
                        assert!(pt.weight > 0.0 && pt.weight.is_finite());
                    }
                }
                let mut s = PointSampler::new(MeasureSpec::volume(pn(p), n).unwrap());
                for _ in 0..50 {
                    let pt = s.sample(&mut rng).unwrap();
                    assert!(quasi_norm(&pt.point, pn(p)) <= 1.0 + 1e-12);
                    assert_eq!(pt.weight, 1.0);
                }
            }
        }
    }

    #[test]
    fn volume_radius_mean() {
        let n = 10;
        let spec = MeasureSpec::volume(pn(1.0), n).unwrap();
        let mut s = PointSampler::new(spec);
        let mut rng = RngState::new(13, 0).rng();
        let mut x = vec![0.0; n];
        let (m, se) = mean_se((0..1_000_000).map(|_| {
            s.draw(&mut rng, &mut x).unwrap();
            x.iter().sum::<f64>()
        }));
        assert!((m - 10.0 / 11.0).abs() < 3.0 * se, "E r = {m}");
    }

    #[test]
    fn tensor_with_zero_beta_matches_cone() {
        let n = 6;
        let first = |spec: MeasureSpec, stream: u64| {
            let mut s = PointSampler::new(spec);
            let mut rng = RngState::new(17, stream).rng();
            let mut x = vec![0.0; n];
            mean_se((0..200_000).map(|_| {
                s.draw(&mut rng, &mut x).unwrap();
                x.iter().copied().fold(0.0, f64::max)
            }))
        };
        let (a, sa) = first(MeasureSpec::cone(pn(0.5), n).unwrap(), 0);
        let (b, sb) = first(MeasureSpec::tensor(pn(0.5), n, 0.0).unwrap(), 1);
        assert!((a - b).abs() < 4.0 * (sa * sa + sb * sb).sqrt());
    }

    #[test]
    fn tensor_sparse_two_dimensional_oracle() {
        // For p = 1, n = 2 the largest coordinate has mean 1/2 + 1/π.
        let spec = MeasureSpec::tensor_sparse(pn(1.0), 2).unwrap();
        let mut s = PointSampler::new(spec);
        let mut rng = RngState::new(19, 0).rng();
        let mut x = [0.0; 2];
        let (m, se) = mean_se((0..1_000_000).map(|_| {
            s.draw(&mut rng, &mut x).unwrap();
            x[0].max(x[1])
        }));
        assert!((m - (0.5 + 1.0 / PI)).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn surface_weights_for_p_one_and_two() {
        let mut rng = RngState::new(23, 0).rng();
        let mut s2 = PointSampler::new(MeasureSpec::surface(pn(2.0), 7).unwrap());
        let mut s1 = PointSampler::new(MeasureSpec::surface(pn(1.0), 7).unwrap());
        let mut x = vec![0.0; 7];
        for _ in 0..1000 {
            assert!((s2.draw(&mut rng, &mut x).unwrap() - 1.0).abs() < 1e-14);
            assert_eq!(s1.draw(&mut rng, &mut x).unwrap(), 7f64.sqrt());
        }
    }

    #[test]
    fn surface_half_norm_arc_oracle() {
        // Curve x1 = t², x2 = (1-t)²; arc length element ∝ (t² + (1-t)²)^{1/2}.
        let opts = QuadOptions::default();
        let ds = |t: f64| (t * t + (1.0 - t) * (1.0 - t)).sqrt();
        let num = integrate(|t| (1.0 - t).powi(2) * ds(t), 0.0, 0.5, opts).unwrap().value;
        let den = integrate(ds, 0.0, 0.5, opts).unwrap().value;
        let exact = num / den;

        let mut s = PointSampler::new(MeasureSpec::surface(pn(0.5), 2).unwrap());
        let mut rng = RngState::new(29, 0).rng();
        let mut x = [0.0; 2];
        let draws: Vec<(f64, f64)> = (0..1_000_000)
            .map(|_| {
                let w = s.draw(&mut rng, &mut x).unwrap();
                (w, x[0].max(x[1]))
            })
            .collect();
        let sw: f64 = draws.iter().map(|d| d.0).sum();
        let est = draws.iter().map(|d| d.0 * d.1).sum::<f64>() / sw;
        let var = draws.iter().map(|d| (d.0 * (d.1 - est)).powi(2)).sum::<f64>() / (sw * sw);
        assert!((est - exact).abs() < 3.0 * var.sqrt(), "{est} vs {exact} ± {}", var.sqrt());
    }

    #[test]
    fn streams_are_reproducible() {
        let spec = MeasureSpec::cone(pn(0.5), 20).unwrap();
        let run = |state: RngState| {
            let mut s = PointSampler::new(spec);
            let mut rng = state.rng();
            let mut out = Vec::new();
            let mut x = vec![0.0; 20];
            for _ in 0..100 {
                s.draw(&mut rng, &mut x).unwrap();
                out.extend(x.iter().map(|v| v.to_bits()));
            }
            out
        };
        let a = RngState::new(42, 0);
        assert_eq!(run(a), run(a));
        assert_ne!(run(a), run(RngState::new(42, 1)));
        assert_ne!(run(a), run(a.for_worker(1)));
        assert_eq!(a.for_worker(0), a);
    }

    #[test]
    fn streams_are_uncorrelated() {
        let n = 100_000;
        let g = GammaSampler::new(1.0).unwrap();
        let mut ra = RngState::new(42, 0).rng();
        let mut rb = RngState::new(42, 1).rng();
        let pairs: Vec<(f64, f64)> = (0..n).map(|_| (g.sample(&mut ra), g.sample(&mut rb))).collect();
        let (ma, _) = mean_se(pairs.iter().map(|p| p.0));
        let (mb, _) = mean_se(pairs.iter().map(|p| p.1));
        let cov: f64 = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum();
        let va: f64 = pairs.iter().map(|p| (p.0 - ma).powi(2)).sum();
        let vb: f64 = pairs.iter().map(|p| (p.1 - mb).powi(2)).sum();
        let rho = cov / (va * vb).sqrt();
        assert!(rho.abs() < 4.0 / (n as f64).sqrt(), "rho = {rho}");
    }

    #[test]
    fn coordinates_are_exchangeable() {
        let n = 5;
        for spec in [MeasureSpec::cone(pn(0.5), n).unwrap(), MeasureSpec::tensor(pn(2.0), n, 1.0).unwrap()] {
            let mut s = PointSampler::new(spec);
            let mut rng = RngState::new(31, 0).rng();
            let mut x = vec![0.0; n];
            let pts: Vec<Vec<f64>> = (0..200_000)
                .map(|_| {
                    s.draw(&mut rng, &mut x).unwrap();
                    x.clone()
                })
                .collect();
            let stats: Vec<(f64, f64)> = (0..n).map(|j| mean_se(pts.iter().map(|x| x[j]))).collect();
            for j in 1..n {
                let diff = stats[j].0 - stats[0].0;
                let se = (stats[j].1.powi(2) + stats[0].1.powi(2)).sqrt();
                assert!(diff.abs() < 4.0 * se, "{} coordinate {j}", spec.label());
            }
        }
    }

    #[test]
    fn sample_returns_sorted_compatible_vectors() {
        let mut rng = RngState::new(37, 0).rng();
        let spec = MeasureSpec::cone(pn(1.0), 4).unwrap();
        let pt = sample_cone(&spec, &mut rng).unwrap();
        assert_eq!(rearrange(&pt.point).len(), 4);
        assert_eq!(pt.weight, 1.0);
        let spec = MeasureSpec::volume(pn(1.0), 4).unwrap();
        assert!(sample_volume(&spec, &mut rng).is_ok());
        assert!(sample_surface(&spec, &mut rng).is_err());
    }
}
