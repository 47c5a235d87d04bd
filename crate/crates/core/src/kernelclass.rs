//! Kernel classes of potential type: sampled norm estimates, truncated
//! integral suprema and checks of the product and embedding inequalities.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryManifold, BoundaryPoint, Param};
use crate::sampling::{chunks_for_level, par_max, PairSample, Sampler, TripleSample, Witness, CHUNK};
use crate::{CVec3, Vec3, C64};

/// Off-diagonal kernel on a boundary. Scalar kernels use component 0 and
/// leave the others zero; vector kernels are measured by their Euclidean
/// magnitude.
pub trait Kernel: Sync {
    fn eval(&self, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<CVec3>;
}

pub fn scalar(v: C64) -> CVec3 {
    CVec3::new(v, C64::new(0.0, 0.0), C64::new(0.0, 0.0))
}

pub fn magnitude(v: &CVec3) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

fn checked(v: CVec3) -> Result<CVec3> {
    if v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(v)
    } else {
        Err(Error::KernelEvaluationFailure(format!("non-finite kernel value {v:?}")))
    }
}

/// Scalar kernel from a closure.
pub struct FnKernel<F>(pub F);

impl<F> Kernel for FnKernel<F>
where
    F: Fn(&BoundaryPoint, &BoundaryPoint) -> C64 + Sync,
{
    fn eval(&self, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<CVec3> {
        checked(scalar((self.0)(x, y)))
    }
}

/// Vector kernel from a closure.
pub struct VecKernel<F>(pub F);

impl<F> Kernel for VecKernel<F>
where
    F: Fn(&BoundaryPoint, &BoundaryPoint) -> Result<CVec3> + Sync,
{
    fn eval(&self, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<CVec3> {
        checked((self.0)(x, y)?)
    }
}

pub struct ZeroKernel;

impl Kernel for ZeroKernel {
    fn eval(&self, _: &BoundaryPoint, _: &BoundaryPoint) -> Result<CVec3> {
        Ok(CVec3::zeros())
    }
}

/// `c K`.
pub struct Scaled<'a> {
    pub kernel: &'a dyn Kernel,
    pub factor: C64,
}

impl Kernel for Scaled<'_> {
    fn eval(&self, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<CVec3> {
        Ok(self.kernel.eval(x, y)? * self.factor)
    }
}

/// `K1 + K2`.
pub struct Sum<'a>(pub &'a dyn Kernel, pub &'a dyn Kernel);

impl Kernel for Sum<'_> {
    fn eval(&self, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<CVec3> {
        Ok(self.0.eval(x, y)? + self.1.eval(x, y)?)
    }
}

/// Product of a scalar kernel with a (possibly vector) kernel.
pub struct Product<'a>(pub &'a dyn Kernel, pub &'a dyn Kernel);

impl Kernel for Product<'_> {
    fn eval(&self, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<CVec3> {
        Ok(self.1.eval(x, y)? * self.0.eval(x, y)?[0])
    }
}

/// `Xi[mu](x, y) = mu(x) - mu(y)`.
pub fn xi_kernel<F>(mu: F) -> FnKernel<impl Fn(&BoundaryPoint, &BoundaryPoint) -> C64 + Sync>
where
    F: Fn(&BoundaryPoint) -> C64 + Sync,
{
    FnKernel(move |x: &BoundaryPoint, y: &BoundaryPoint| mu(x) - mu(y))
}

/// Convolution kernel `k(x - y)` with `k` positively homogeneous of degree
/// `-h`.
pub struct HomogeneousKernel<F> {
    k: F,
    h: f64,
}

impl<F> HomogeneousKernel<F> {
    pub fn degree(&self) -> f64 {
        self.h
    }
    /// Exponents `(h, h + 1, 1)`.
    pub fn advertised_class(&self) -> Exponents {
        Exponents::new(self.h, self.h + 1.0, 1.0)
    }
}

impl<F> Kernel for HomogeneousKernel<F>
where
    F: Fn(&Vec3) -> C64 + Sync,
{
    fn eval(&self, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<CVec3> {
        let d = x.x - y.x;
        if d.norm() == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        checked(scalar((self.k)(&d)))
    }
}

pub const HOMOGENEITY_TOL: f64 = 1e-8;

/// Wraps `k` after checking `k(t xi) = t^{-h} k(xi)` on sampled directions
/// in dimension `dim` and dilations `t` in `[1e-3, 1e3]`.
pub fn homogeneous_kernel<F>(k: F, h: f64, dim: usize) -> Result<HomogeneousKernel<F>>
where
    F: Fn(&Vec3) -> C64 + Sync,
{
    let mut worst: f64 = 0.0;
    for xi in crate::fundsol::sample_directions(dim, 32) {
        let base = k(&xi);
        for t in [1e-3, 0.1, 0.5, 2.0, 10.0, 1e3] {
            let lhs = k(&(t * xi));
            let rhs = base * t.powf(-h);
            let scale = lhs.norm().max(rhs.norm());
            if scale > 0.0 {
                let res = (lhs - rhs).norm() / scale;
                if !res.is_finite() {
                    return Err(Error::NotHomogeneous { degree: h, residual: f64::INFINITY });
                }
                worst = worst.max(res);
            }
        }
    }
    if worst > HOMOGENEITY_TOL {
        return Err(Error::NotHomogeneous { degree: h, residual: worst });
    }
    Ok(HomogeneousKernel { k, h })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl Exponents {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Self {
        Self { s1, s2, s3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub level: u32,
    pub first_sup: f64,
    pub second_sup: f64,
    pub n_pairs: usize,
    pub n_triples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelClassEstimate {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    /// `sup |x - y|^{s1} |K(x, y)|`.
    pub first_sup: f64,
    /// `sup |x' - y|^{s2} |x' - x''|^{-s3} |K(x', y) - K(x'', y)|`.
    pub second_sup: f64,
    pub sharp_sup: Option<f64>,
    pub n_pairs: usize,
    pub n_triples: usize,
    pub refinement_trace: Vec<TraceEntry>,
    /// `[x, y]` at the first supremum.
    pub first_witness: Option<[Vec<f64>; 2]>,
    /// `[x', x'', y]` at the second supremum.
    pub second_witness: Option<[Vec<f64>; 3]>,
}

impl KernelClassEstimate {
    pub fn norm(&self) -> f64 {
        self.first_sup + self.second_sup
    }
}

pub(crate) fn coords(p: &BoundaryPoint, dim: usize) -> Vec<f64> {
    p.x.iter().take(dim).copied().collect()
}

pub fn first_quotient(k: &dyn Kernel, s1: f64, p: &PairSample) -> Result<f64> {
    Ok(p.dist.powf(s1) * magnitude(&k.eval(&p.x, &p.y)?))
}

pub fn second_quotient(k: &dyn Kernel, s: &Exponents, t: &TripleSample) -> Result<f64> {
    let diff = k.eval(&t.x1, &t.y)? - k.eval(&t.x2, &t.y)?;
    Ok(t.d1y.powf(s.s2) / t.d12.powf(s.s3) * magnitude(&diff))
}

/// Sampled estimate of the two suprema defining the class norm. Levels
/// `0..=level` use nested sample sets; the trace records the running
/// suprema after each level.
pub fn class_norm(k: &dyn Kernel, m: &BoundaryManifold, s: Exponents, seed: u64, level: u32) -> Result<KernelClassEstimate> {
    class_norm_with(k, &Sampler::new(m, seed), s, level)
}

pub fn class_norm_with(k: &dyn Kernel, sampler: &Sampler, s: Exponents, level: u32) -> Result<KernelClassEstimate> {
    let dim = sampler.manifold().dim();
    let mut first: Option<Witness<PairSample>> = None;
    let mut second: Option<Witness<TripleSample>> = None;
    let mut trace = Vec::new();
    let mut done = 0;
    for l in 0..=level {
        let upto = chunks_for_level(l);
        let f = par_max(done..upto, |c| {
            let mut best: Option<Witness<PairSample>> = None;
            for p in sampler.pair_chunk(c) {
                let q = first_quotient(k, s.s1, &p)?;
                if best.as_ref().map_or(true, |b| q > b.value) {
                    best = Some(Witness { value: q, at: p });
                }
            }
            Ok::<_, Error>(best)
        })?;
        let g = par_max(done..upto, |c| {
            let mut best: Option<Witness<TripleSample>> = None;
            for t in sampler.triple_chunk(c) {
                let q = second_quotient(k, &s, &t)?;
                if best.as_ref().map_or(true, |b| q > b.value) {
                    best = Some(Witness { value: q, at: t });
                }
            }
            Ok::<_, Error>(best)
        })?;
        if let Some(w) = f {
            if first.as_ref().map_or(true, |b| w.value > b.value) {
                first = Some(w);
            }
        }
        if let Some(w) = g {
            if second.as_ref().map_or(true, |b| w.value > b.value) {
                second = Some(w);
            }
        }
        done = upto;
        let n = done as usize * CHUNK;
        trace.push(TraceEntry {
            level: l,
            first_sup: first.as_ref().map_or(0.0, |w| w.value),
            second_sup: second.as_ref().map_or(0.0, |w| w.value),
            n_pairs: n,
            n_triples: n,
        });
    }
    let last = trace.last().unwrap().clone();
    Ok(KernelClassEstimate {
        s1: s.s1,
        s2: s.s2,
        s3: s.s3,
        first_sup: last.first_sup,
        second_sup: last.second_sup,
        sharp_sup: None,
        n_pairs: last.n_pairs,
        n_triples: last.n_triples,
        refinement_trace: trace,
        first_witness: first.map(|w| [coords(&w.at.x, dim), coords(&w.at.y, dim)]),
        second_witness: second.map(|w| [coords(&w.at.x1, dim), coords(&w.at.x2, dim), coords(&w.at.y, dim)]),
    })
}

/// Dyadic radii `hi, hi/2, ...` down to `lo`, in ascending order.
pub fn dyadic_radii(lo: f64, hi: f64) -> Vec<f64> {
    let mut r = vec![];
    let mut v = hi;
    while v >= lo * (1.0 - 1e-12) {
        r.push(v);
        v *= 0.5;
    }
    r.reverse();
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct SharpEstimate {
    pub sup: f64,
    /// Target parameter and radius at the supremum.
    pub witness: Option<(f64, f64)>,
    /// `(r, max over targets)` per radius.
    pub curve: Vec<(f64, f64)>,
    pub targets: usize,
}

/// Targets for truncated-integral suprema: the nodes of the level-0 rule.
pub fn sharp_targets(m: &BoundaryManifold) -> Vec<Param> {
    m.surface_quadrature(0).nodes.iter().map(|p| p.param).collect()
}

/// Vector of truncated integrals `int_{boundary \ B(x, r)} K(x, y) dsigma_y`
/// at one target and radius.
pub fn truncated_integral(k: &dyn Kernel, m: &BoundaryManifold, x: &Param, r: f64, level: u32) -> Result<CVec3> {
    let rule = m.excised_rule(x, r, level);
    let bx = m.point(x);
    let mut acc = CVec3::zeros();
    for (p, w) in rule.nodes.iter().zip(&rule.weights) {
        acc += k.eval(&bx, p)? * C64::from(*w);
    }
    Ok(acc)
}

/// `sup_{x, r} |int_{boundary \ B(x, r)} K(x, y) dsigma_y|` over the level-0
/// nodes `x` and the supplied radii.
pub fn sharp_norm(k: &dyn Kernel, m: &BoundaryManifold, level: u32, radii: &[f64]) -> Result<SharpEstimate> {
    let targets = sharp_targets(m);
    let per_target: Vec<Result<Vec<f64>>> = targets
        .par_iter()
        .map(|x| radii.iter().map(|r| truncated_integral(k, m, x, *r, level).map(|v| magnitude(&v))).collect())
        .collect();
    let mut curve: Vec<(f64, f64)> = radii.iter().map(|r| (*r, 0.0)).collect();
    let mut sup = 0.0;
    let mut witness = None;
    for (x, vals) in targets.iter().zip(per_target) {
        let vals = vals?;
        for (i, v) in vals.iter().enumerate() {
            curve[i].1 = curve[i].1.max(*v);
            if *v > sup || witness.is_none() {
                sup = v.max(sup);
                witness = Some((x.scalar(), radii[i]));
            }
        }
    }
    Ok(SharpEstimate { sup, witness, curve, targets: targets.len() })
}

/// Default radii for truncated-integral suprema: dyadic in
/// `[1e-4 diam, diam]`.
pub fn default_sharp_radii(m: &BoundaryManifold) -> Vec<f64> {
    dyadic_radii(1e-4 * m.diameter(), m.diameter())
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub violations: usize,
    /// Largest observed `lhs / rhs`.
    pub max_ratio: f64,
    pub witness: Option<Vec<Vec<f64>>>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), passed: true, samples: 0, violations: 0, max_ratio: 0.0, witness: None }
    }

    /// Records `lhs <= rhs * (1 + slack)`.
    fn record(&mut self, lhs: f64, rhs: f64, slack: f64, witness: impl FnOnce() -> Vec<Vec<f64>>) {
        self.samples += 1;
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > self.max_ratio {
            self.max_ratio = ratio;
        }
        if lhs > rhs * (1.0 + slack) {
            self.violations += 1;
            self.passed = false;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }
}

/// Relative slack absorbing rounding in pointwise inequalities.
pub const ROUNDING_SLACK: f64 = 1e-12;
/// Slack for inequalities between sampled norms.
pub const NORM_SLACK: f64 = 0.05;

/// Lipschitz function on the sphere times `[0, diam]`, for the spherical
/// difference bound.
pub struct SphericalLipschitz<'a> {
    pub f: &'a (dyn Fn(&Vec3, f64) -> C64 + Sync),
    pub lip: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub samples: usize,
    pub diameter: f64,
    pub norm_k1: f64,
    pub norm_k2: f64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Sampled checks of the product inequality, the class embeddings, the
/// admissible-triple comparison and (optionally) the spherical-Lipschitz
/// bound. Norms are taken over the same sample set on which the pointwise
/// inequalities are tested, so every inequality is a theorem on the samples.
#[allow(clippy::too_many_arguments)]
pub fn verify_kernel_algebra(
    k1: &dyn Kernel,
    e1: Exponents,
    k2: &dyn Kernel,
    e2: Exponents,
    m: &BoundaryManifold,
    spherical: Option<&SphericalLipschitz>,
    seed: u64,
    samples: usize,
) -> Result<AlgebraReport> {
    let sampler = Sampler::new(m, seed);
    let n_chunks = samples.div_ceil(CHUNK).max(1) as u64;
    let dim = m.dim();
    let triples: Vec<TripleSample> = (0..n_chunks).into_par_iter().flat_map_iter(|c| sampler.triple_chunk(c)).collect();
    let pairs: Vec<PairSample> = (0..n_chunks).into_par_iter().flat_map_iter(|c| sampler.pair_chunk(c)).collect();
    let diam = pairs
        .iter()
        .map(|p| p.dist)
        .chain(triples.iter().map(|t| t.d1y.max(t.d2y)))
        .fold(m.diameter(), f64::max);

    struct Eval {
        k1a: CVec3,
        k1b: CVec3,
        k2a: CVec3,
        k2b: CVec3,
    }
    let evals: Vec<Eval> = triples
        .par_iter()
        .map(|t| {
            Ok(Eval {
                k1a: k1.eval(&t.x1, &t.y)?,
                k1b: k1.eval(&t.x2, &t.y)?,
                k2a: k2.eval(&t.x1, &t.y)?,
                k2b: k2.eval(&t.x2, &t.y)?,
            })
        })
        .collect::<Result<_>>()?;
    let pair_vals: Vec<(CVec3, CVec3)> =
        pairs.par_iter().map(|p| Ok((k1.eval(&p.x, &p.y)?, k2.eval(&p.x, &p.y)?))).collect::<Result<_>>()?;

    // Sampled norms over pairs, the pairs induced by triples, and triples.
    let norms = |e: &Exponents, pick: &dyn Fn(&Eval) -> (CVec3, CVec3), pick_pair: &dyn Fn(&(CVec3, CVec3)) -> CVec3| {
        let mut first: f64 = 0.0;
        let mut second: f64 = 0.0;
        for (p, v) in pairs.iter().zip(&pair_vals) {
            first = first.max(p.dist.powf(e.s1) * magnitude(&pick_pair(v)));
        }
        for (t, ev) in triples.iter().zip(&evals) {
            let (a, b) = pick(ev);
            first = first.max(t.d1y.powf(e.s1) * magnitude(&a)).max(t.d2y.powf(e.s1) * magnitude(&b));
            second = second.max(t.d1y.powf(e.s2) / t.d12.powf(e.s3) * magnitude(&(a - b)));
        }
        (first, second)
    };
    let pick1 = |ev: &Eval| (ev.k1a, ev.k1b);
    let pick2 = |ev: &Eval| (ev.k2a, ev.k2b);
    let (f1, g1) = norms(&e1, &pick1, &|v| v.0);
    let (f2, g2) = norms(&e2, &pick2, &|v| v.1);
    let n1 = f1 + g1;
    let n2 = f2 + g2;
    let tw = |t: &TripleSample| vec![coords(&t.x1, dim), coords(&t.x2, dim), coords(&t.y, dim)];

    // Product inequality: K1 scalar, K2 scalar or vector.
    let mut product = CheckResult::new("product_inequality");
    for (t, ev) in triples.iter().zip(&evals) {
        let lhs = magnitude(&(ev.k2a * ev.k1a[0] - ev.k2b * ev.k1b[0]));
        let rhs = n1
            * n2
            * (t.d12.powf(e1.s3) / t.d1y.powf(e1.s2 + e2.s1)
                + 2f64.powf(e1.s1.abs()) * t.d12.powf(e2.s3) / t.d1y.powf(e2.s2 + e1.s1));
        product.record(lhs, rhs, ROUNDING_SLACK, || tw(t));
    }

    // ||K||_{K_{s1}} <= ||K||_{K_{s1,s2,s3}}.
    let mut first_embed = CheckResult::new("potential_type_embedding");
    first_embed.record(f1, n1, ROUNDING_SLACK, Vec::new);
    first_embed.record(f2, n2, ROUNDING_SLACK, Vec::new);

    // Exponent reduction by a > 0 in the second and third exponent.
    let a = 0.5;
    let c_red = diam.powf(a).max(1.0);
    let mut reduce = CheckResult::new("exponent_reduction");
    for (t, ev) in triples.iter().zip(&evals) {
        let diff = magnitude(&(ev.k1a - ev.k1b));
        let lhs = t.d1y.powf(e1.s2 - a) / t.d12.powf(e1.s3 - a) * diff;
        let rhs = t.d1y.powf(e1.s2) / t.d12.powf(e1.s3) * diff;
        reduce.record(lhs, c_red * rhs, ROUNDING_SLACK, || tw(t));
    }
    let (_, g1r) = norms(&Exponents::new(e1.s1, e1.s2 - a, e1.s3 - a), &pick1, &|v| v.0);
    reduce.record(f1 + g1r, c_red * n1, NORM_SLACK, Vec::new);

    // Embedding into (t1, t2, t3) with t1 >= s1, t3 <= s3, t2 - t3 >= s2 - s3.
    let t = Exponents::new(e1.s1 + 0.5, e1.s2, e1.s3 - 0.25);
    let c_emb = diam
        .powf(t.s1 - e1.s1)
        .max(2f64.powf(t.s3 - e1.s3) * diam.powf((t.s2 - t.s3) - (e1.s2 - e1.s3)));
    let mut embed = CheckResult::new("class_embedding");
    for (p, v) in pairs.iter().zip(&pair_vals) {
        let mk = magnitude(&v.0);
        embed.record(p.dist.powf(t.s1) * mk, c_emb * p.dist.powf(e1.s1) * mk, ROUNDING_SLACK, || {
            vec![coords(&p.x, dim), coords(&p.y, dim)]
        });
    }
    for (tr, ev) in triples.iter().zip(&evals) {
        let diff = magnitude(&(ev.k1a - ev.k1b));
        let lhs = tr.d1y.powf(t.s2) / tr.d12.powf(t.s3) * diff;
        let rhs = tr.d1y.powf(e1.s2) / tr.d12.powf(e1.s3) * diff;
        embed.record(lhs, c_emb * rhs, ROUNDING_SLACK, || tw(tr));
    }
    let (ft, gt) = norms(&t, &pick1, &|v| v.0);
    embed.record(ft + gt, c_emb * n1, NORM_SLACK, Vec::new);

    let mut comparison = CheckResult::new("admissible_triple_comparison");
    for tr in &triples {
        comparison.record(
            if tr.comparison_holds() && tr.d1y >= 2.0 * tr.d12 { 0.0 } else { 1.0 },
            0.0,
            0.0,
            || tw(tr),
        );
    }

    let mut checks = vec![product, first_embed, reduce, embed, comparison];
    if let Some(sl) = spherical {
        let mut c = CheckResult::new("spherical_lipschitz");
        for tr in &triples {
            let d1 = tr.x1.x - tr.y.x;
            let d2 = tr.x2.x - tr.y.x;
            let f1 = (sl.f)(&(d1 / tr.d1y), tr.d1y);
            let f2 = (sl.f)(&(d2 / tr.d2y), tr.d2y);
            let lhs = (f1 - f2).norm();
            let rhs = sl.lip * (2.0 + diam) * tr.d12 / tr.d1y;
            c.record(lhs, rhs, ROUNDING_SLACK, || tw(tr));
        }
        checks.push(c);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(AlgebraReport { samples: triples.len(), diameter: diam, norm_k1: n1, norm_k2: n2, checks, passed })
}

/// `(2 + 2h) 2^{h+1} max(sup |k|, Lip k)` on the unit sphere, the bound on
/// the difference quotient of a homogeneous convolution kernel.
pub fn homogeneous_difference_bound(h: f64, sup_k: f64, lip_k: f64) -> f64 {
    (2.0 + 2.0 * h) * 2f64.powf(h + 1.0) * sup_k.max(lip_k)
}

/// Sampled `sup |k|` and Lipschitz constant of `k` on the unit sphere of
/// dimension `dim`, over a dense grid (circle) or direction lattice.
pub fn sphere_sup_and_lip<F: Fn(&Vec3) -> C64>(k: F, dim: usize) -> (f64, f64) {
    let pts: Vec<Vec3> = if dim == 2 {
        (0..2048).map(|i| {
            let t = 2.0 * PI * i as f64 / 2048.0;
            Vec3::new(t.cos(), t.sin(), 0.0)
        })
        .collect()
    } else {
        crate::fundsol::sample_directions(3, 1024)
    };
    let vals: Vec<C64> = pts.iter().map(&k).collect();
    let sup = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut lip: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = (pts[i] - pts[j]).norm();
            if d > 0.0 {
                lip = lip.max((vals[i] - vals[j]).norm() / d);
            }
        }
    }
    (sup, lip)
}
