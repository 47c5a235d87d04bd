//! Moduli of continuity, sampled Hoelder seminorms, the exponent case
//! analysis for integral operators, and regularity reports for double layer
//! potentials on curves.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dlp::DoubleLayer;
use crate::error::{Error, Result};
use crate::fundsol::FundamentalSolution;
use crate::geometry::{BoundaryManifold, BoundaryPoint, Param};
use crate::sampling::{chunks_for_level, relative_drift, Sampler};
use crate::C64;

/// `omega_theta(r)`: `r^theta |ln r|` on `]0, e^{-1/theta}]`, constant
/// beyond, zero at zero.
pub fn omega_theta(theta: f64, r: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::BadTheta(theta));
    }
    Ok(omega_unchecked(theta, r))
}

fn omega_unchecked(theta: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let rt = (-1.0 / theta).exp();
    let r = r.min(rt);
    r.powf(theta) * r.ln().abs()
}

/// A modulus of continuity.
#[derive(Clone)]
pub enum Modulus {
    Power(f64),
    OmegaTheta(f64),
    Max(Vec<Modulus>),
    Custom { name: String, f: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for Modulus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl PartialEq for Modulus {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Modulus::Power(a), Modulus::Power(b)) => a == b,
            (Modulus::OmegaTheta(a), Modulus::OmegaTheta(b)) => a == b,
            (Modulus::Max(a), Modulus::Max(b)) => a == b,
            (Modulus::Custom { name: a, .. }, Modulus::Custom { name: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Modulus {
    pub fn power(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Modulus::Power(alpha))
        } else {
            Err(Error::Config(format!("power modulus needs a positive exponent, got {alpha}")))
        }
    }

    pub fn omega(theta: f64) -> Result<Self> {
        omega_theta(theta, 0.5)?;
        Ok(Modulus::OmegaTheta(theta))
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Modulus::Power(a) => {
                if r <= 0.0 {
                    0.0
                } else {
                    r.powf(*a)
                }
            }
            Modulus::OmegaTheta(t) => omega_unchecked(*t, r),
            Modulus::Max(list) => list.iter().map(|m| m.eval(r)).fold(0.0, f64::max),
            Modulus::Custom { f, .. } => f(r),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Modulus::Power(a) => format!("power({a})"),
            Modulus::OmegaTheta(t) => format!("omega({t})"),
            Modulus::Max(list) => {
                format!("max({})", list.iter().map(|m| m.label()).collect::<Vec<_>>().join(","))
            }
            Modulus::Custom { name, .. } => name.clone(),
        }
    }

    /// Leading power of the modulus at zero; the log factor of `omega_theta`
    /// is ignored. `None` for custom moduli.
    pub fn exponent(&self) -> Option<f64> {
        match self {
            Modulus::Power(a) => Some(*a),
            Modulus::OmegaTheta(t) => Some(*t),
            Modulus::Max(list) => list.iter().map(|m| m.exponent()).try_fold(f64::INFINITY, |acc, e| e.map(|e| acc.min(e))),
            Modulus::Custom { .. } => None,
        }
    }

    /// Grid check of the standing conditions on a modulus.
    pub fn check(&self) -> ModulusCheck {
        let ts: Vec<f64> = (0..=90).map(|i| 10f64.powf(-8.0 + 9.0 * i as f64 / 90.0)).collect();
        let as_: Vec<f64> = (0..=40).map(|i| 10f64.powf(4.0 * i as f64 / 40.0)).collect();
        let zero_at_zero = self.eval(0.0) == 0.0;
        let positive = ts.iter().all(|t| self.eval(*t) > 0.0);
        let increasing = ts.windows(2).all(|w| self.eval(w[1]) >= self.eval(w[0]));
        let vanishes = self.eval(1e-300) < 1e-3 * self.eval(1.0).max(f64::MIN_POSITIVE);
        let mut sup: f64 = 0.0;
        for t in &ts {
            let wt = self.eval(*t);
            for a in &as_ {
                sup = sup.max(self.eval(a * t) / (a * wt));
            }
        }
        let passed = zero_at_zero && positive && increasing && vanishes && sup.is_finite();
        ModulusCheck { modulus: self.label(), zero_at_zero, positive, increasing, vanishes_at_zero: vanishes, dilation_sup: sup, passed }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusCheck {
    pub modulus: String,
    pub zero_at_zero: bool,
    pub positive: bool,
    pub increasing: bool,
    pub vanishes_at_zero: bool,
    /// `sup omega(a t) / (a omega(t))` over the grid.
    pub dilation_sup: f64,
    pub passed: bool,
}

/// Estimator parameters shared by seminorm estimates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EstimatorConfig {
    /// Smallest sampled separation, relative to the diameter.
    pub separation_floor: f64,
    /// Largest relative change across the final two levels for a stable
    /// estimate.
    pub stability: f64,
    /// Estimates below this are treated as zero when judging stability.
    pub zero_floor: f64,
    /// Separation buckets per decade.
    pub buckets_per_decade: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { separation_floor: 1e-5, stability: 0.05, zero_floor: 1e-8, buckets_per_decade: 4 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleRow {
    /// Upper edge of the separation bucket.
    pub separation: f64,
    pub max_quotient: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderEstimate {
    pub modulus: Modulus,
    pub seminorm: f64,
    pub scale_table: Vec<ScaleRow>,
    pub stable: bool,
    pub trace: Vec<(u32, f64)>,
    pub n_pairs: usize,
}

/// Per-bucket maxima of `|f(x) - f(y)| / omega(|x - y|)`.
struct Table {
    lo: f64,
    per_decade: usize,
    rows: Vec<(f64, usize)>,
}

impl Table {
    fn new(lo: f64, hi: f64, per_decade: usize) -> Self {
        let n = ((hi / lo).log10() * per_decade as f64).ceil().max(1.0) as usize + 1;
        Self { lo, per_decade, rows: vec![(0.0, 0); n] }
    }

    fn add(&mut self, d: f64, q: f64) {
        let idx = if d <= self.lo { 0 } else { ((d / self.lo).log10() * self.per_decade as f64).ceil() as usize };
        let idx = idx.min(self.rows.len() - 1);
        let row = &mut self.rows[idx];
        row.0 = row.0.max(q);
        row.1 += 1;
    }

    fn merge(&mut self, other: &Table) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.0 = a.0.max(b.0);
            a.1 += b.1;
        }
    }

    fn max(&self) -> f64 {
        self.rows.iter().map(|r| r.0).fold(0.0, f64::max)
    }

    fn rows(&self) -> Vec<ScaleRow> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.1 > 0)
            .map(|(i, r)| ScaleRow {
                separation: self.lo * 10f64.powf(i as f64 / self.per_decade as f64),
                max_quotient: r.0,
                count: r.1,
            })
            .collect()
    }
}

/// Seminorm of nodal data over all pairs of nodes.
pub fn nodal_seminorm(
    values: &[C64],
    nodes: &[BoundaryPoint],
    m: &BoundaryManifold,
    modulus: &Modulus,
    cfg: &EstimatorConfig,
) -> (f64, Vec<ScaleRow>) {
    let diam = m.diameter();
    let lo = cfg.separation_floor * diam;
    let per_row: Vec<Table> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let mut t = Table::new(lo, 2.0 * diam, cfg.buckets_per_decade);
            for j in (i + 1)..nodes.len() {
                let d = m.chord(&nodes[i].param, &nodes[j].param).norm();
                if d > 0.0 {
                    t.add(d, (values[i] - values[j]).norm() / modulus.eval(d));
                }
            }
            t
        })
        .collect();
    let mut table = Table::new(lo, 2.0 * diam, cfg.buckets_per_decade);
    for t in &per_row {
        table.merge(t);
    }
    (table.max(), table.rows())
}

/// Sampled `sup |f(x) - f(y)| / omega(|x - y|)`.
///
/// Level `L` uses the nested random pairs of levels `0..=L` and, on curves,
/// all pairs of the `32 * 2^L` equispaced nodes.
pub fn holder_seminorm(
    f: &(dyn Fn(&BoundaryPoint) -> C64 + Sync),
    m: &BoundaryManifold,
    modulus: &Modulus,
    seed: u64,
    level: u32,
    cfg: &EstimatorConfig,
) -> HolderEstimate {
    let sampler = Sampler::new(m, seed).with_floor(cfg.separation_floor);
    let diam = m.diameter();
    let lo = cfg.separation_floor * diam;
    let mut table = Table::new(lo, 2.0 * diam, cfg.buckets_per_decade);
    let mut trace = Vec::new();
    let mut done = 0;
    let mut n_pairs = 0;
    for l in 0..=level {
        let upto = chunks_for_level(l);
        let parts: Vec<Table> = (done..upto)
            .into_par_iter()
            .map(|c| {
                let mut t = Table::new(lo, 2.0 * diam, cfg.buckets_per_decade);
                for p in sampler.pair_chunk(c) {
                    t.add(p.dist, (f(&p.x) - f(&p.y)).norm() / modulus.eval(p.dist));
                }
                t
            })
            .collect();
        for t in &parts {
            table.merge(t);
        }
        n_pairs += (upto - done) as usize * crate::sampling::CHUNK;
        done = upto;
        if m.dim() == 2 {
            let nodes = m.surface_quadrature(l).nodes;
            let vals: Vec<C64> = nodes.iter().map(f).collect();
            let (_, rows) = nodal_seminorm(&vals, &nodes, m, modulus, cfg);
            for r in rows {
                table.add(r.separation * (1.0 - 1e-9), r.max_quotient);
            }
            n_pairs += nodes.len() * (nodes.len() - 1) / 2;
        }
        trace.push((l, table.max()));
    }
    let stable = trace.len() < 2 || {
        let k = trace.len();
        relative_drift(trace[k - 2].1, trace[k - 1].1, cfg.zero_floor) <= cfg.stability
    };
    HolderEstimate { modulus: modulus.clone(), seminorm: table.max(), scale_table: table.rows(), stable, trace, n_pairs }
}

#[derive(Debug, Clone, Serialize)]
pub struct RemarkReport {
    pub modulus: Modulus,
    pub a: f64,
    pub sup_f: f64,
    /// `2 sup|f| / omega(a)`.
    pub bound: f64,
    pub max_quotient: f64,
    pub max_ratio_to_bound: f64,
    pub samples: usize,
    pub violations: usize,
    pub passed: bool,
}

/// Checks `|f(x) - f(y)| / omega(|x - y|) <= 2 sup|f| / omega(a)` over
/// sampled pairs with `|x - y| >= a`; `sup |f|` is taken over the same
/// samples.
pub fn remark_bound_check(
    f: &(dyn Fn(&BoundaryPoint) -> C64 + Sync),
    m: &BoundaryManifold,
    modulus: &Modulus,
    a: f64,
    seed: u64,
    samples: usize,
) -> RemarkReport {
    let sampler = Sampler::new(m, seed).with_floor((a / m.diameter()).min(1.0));
    let chunks = samples.div_ceil(crate::sampling::CHUNK).max(1) as u64;
    let pairs: Vec<_> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| sampler.pair_chunk(c))
        .filter(|p| p.dist >= a)
        .map(|p| (f(&p.x), f(&p.y), p.dist))
        .collect();
    let sup_f = pairs.iter().map(|(u, v, _)| u.norm().max(v.norm())).fold(0.0, f64::max);
    let bound = 2.0 * sup_f / modulus.eval(a);
    let mut max_q: f64 = 0.0;
    let mut violations = 0;
    for (u, v, d) in &pairs {
        let q = (u - v).norm() / modulus.eval(*d);
        max_q = max_q.max(q);
        if q > bound * (1.0 + crate::kernelclass::ROUNDING_SLACK) {
            violations += 1;
        }
    }
    let ratio = if bound > 0.0 { max_q / bound } else { 0.0 };
    RemarkReport {
        modulus: modulus.clone(),
        a,
        sup_f,
        bound,
        max_quotient: max_q,
        max_ratio_to_bound: ratio,
        samples: pairs.len(),
        violations,
        passed: violations == 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MainCase {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubCase {
    A,
    Aa,
    B,
    Bb,
    C,
    Cc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub case: MainCase,
    pub sub: SubCase,
    pub target_modulus: Modulus,
}

impl Classification {
    pub fn label(&self) -> String {
        let main = match self.case {
            MainCase::I => "i",
            MainCase::II => "ii",
            MainCase::III => "iii",
        };
        let sub = match self.sub {
            SubCase::A => "a",
            SubCase::Aa => "aa",
            SubCase::B => "b",
            SubCase::Bb => "bb",
            SubCase::C => "c",
            SubCase::Cc => "cc",
        };
        format!("({main})({sub})")
    }
}

/// Target modulus for an integral operator whose kernel's tangential
/// gradient lies in the class `(t1, t2, t3)`, acting on `C^{0,beta}`.
pub fn iokreg_classify(n: usize, s1: f64, t1: f64, t2: f64, t3: f64, beta: f64) -> Result<Classification> {
    let nm = n as f64 - 1.0;
    let fail = |m: String| Err(Error::HypothesisViolated(m));
    if !(0.0..nm).contains(&s1) {
        return fail(format!("s1 = {s1} not in [0, {nm}["));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return fail(format!("beta = {beta} not in ]0, 1]"));
    }
    if !(t1 >= beta && t1 < nm + beta) {
        return fail(format!("t1 = {t1} not in [beta, {nm} + beta["));
    }
    if t2 < beta {
        return fail(format!("t2 = {t2} < beta"));
    }
    if !(t3 > 0.0 && t3 <= 1.0) {
        return fail(format!("t3 = {t3} not in ]0, 1]"));
    }
    // boundary cases are decided up to rounding in the inputs
    let cmp = |a: f64, b: f64| if (a - b).abs() <= CASE_TOL * a.abs().max(b.abs()).max(1.0) { 0.0 } else { a - b };
    let case = match cmp(t1, nm) {
        d if d < 0.0 => MainCase::I,
        d if d == 0.0 => MainCase::II,
        _ => MainCase::III,
    };
    let gap = cmp(t2 - beta, nm);
    // slack of the exponent below beta; zero means the exponent is beta
    let mut deficit = cmp(nm + t3, t2).min(0.0);
    if case == MainCase::III {
        deficit = deficit.min(cmp(nm, t1));
    }
    if gap > 0.0 && cmp(t2, nm + beta + t3) < 0.0 {
        let sub = match case {
            MainCase::I => SubCase::A,
            MainCase::II => SubCase::B,
            MainCase::III => SubCase::C,
        };
        Ok(Classification { case, sub, target_modulus: Modulus::Power(beta + deficit) })
    } else if gap == 0.0 {
        let mut list = vec![Modulus::Power(beta), Modulus::OmegaTheta(t3)];
        if case == MainCase::III {
            list.insert(1, Modulus::Power(beta + cmp(nm, t1)));
        }
        let sub = match case {
            MainCase::I => SubCase::Aa,
            MainCase::II => SubCase::Bb,
            MainCase::III => SubCase::Cc,
        };
        Ok(Classification { case, sub, target_modulus: Modulus::Max(list) })
    } else if gap < 0.0 {
        fail(format!("t2 - beta = {} < n - 1", t2 - beta))
    } else {
        fail(format!("t2 = {t2} >= (n - 1) + beta + t3"))
    }
}

/// Relative tolerance for the equality cases of [`iokreg_classify`].
pub const CASE_TOL: f64 = 1e-12;

/// A test density on a curve.
pub struct Density {
    pub name: String,
    pub f: Box<dyn Fn(&BoundaryPoint) -> C64 + Sync>,
    /// Curve parameters where the density is not smooth.
    pub breaks: Vec<f64>,
    /// Hoelder exponent of the density; `None` for smooth densities, which
    /// take the exponent of the report.
    pub beta: Option<f64>,
}

impl Density {
    /// `sum_k a_k cos(k t) + b_k sin(k t)`.
    pub fn trig(name: &str, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Density {
            name: name.to_string(),
            f: Box::new(move |p: &BoundaryPoint| {
                let t = p.param.angle();
                let mut v = 0.0;
                for (k, c) in cos.iter().enumerate() {
                    v += c * (k as f64 * t).cos();
                }
                for (k, s) in sin.iter().enumerate() {
                    v += s * (k as f64 * t).sin();
                }
                C64::from(v)
            }),
            breaks: vec![],
            beta: None,
        }
    }

    /// `|sin((t - t0) / 2)|^beta`.
    pub fn kink(name: &str, t0: f64, beta: f64) -> Self {
        Density {
            name: name.to_string(),
            f: Box::new(move |p: &BoundaryPoint| C64::from((0.5 * (p.param.angle() - t0)).sin().abs().powf(beta))),
            breaks: vec![t0],
            beta: Some(beta),
        }
    }

    /// `c mu`.
    pub fn scaled(self, c: f64) -> Self {
        let f = self.f;
        Density { name: format!("{}*{c}", self.name), f: Box::new(move |p| f(p) * c), breaks: self.breaks, beta: self.beta }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityRegularity {
    pub density: String,
    pub beta: f64,
    pub smooth: bool,
    pub classification: String,
    pub modulus: Modulus,
    /// `(level, seminorm of the tangential derivative of W[mu])`.
    pub seminorm_trace: Vec<(u32, f64)>,
    pub stable: bool,
    /// `(|W|_inf + |W'|_inf + [W']_omega) / (|mu|_inf + [mu]_beta)` per level.
    pub ratio_trace: Vec<(u32, f64)>,
    pub ratio: f64,
    pub ratio_stable: bool,
    /// A modulus stronger than the predicted one, with its trace.
    pub strong_modulus: Modulus,
    pub strong_trace: Vec<(u32, f64)>,
    /// Relative growth of the strong-modulus seminorm across the final two
    /// levels.
    pub strong_growth: f64,
    pub scale_table: Vec<ScaleRow>,
    pub strong_scale_table: Vec<ScaleRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub operator: String,
    pub boundary: String,
    pub beta: f64,
    pub levels: Vec<u32>,
    pub quadrature_level: u32,
    pub densities: Vec<DensityRegularity>,
}

/// Nodal values of `W[mu]` and of its arc-length derivative on the
/// `32 * 2^level` equispaced nodes of a curve.
pub fn w_and_derivative(dl: &DoubleLayer, mu: &Density, level: u32, quad_level: u32) -> Result<(Vec<BoundaryPoint>, Vec<C64>, Vec<C64>)> {
    let m = dl.manifold();
    let nodes = m.surface_quadrature(level).nodes;
    let w: Vec<C64> = nodes
        .par_iter()
        .map(|p| dl.eval_w(&*mu.f, &p.param, quad_level, &mu.breaks))
        .collect::<Result<_>>()?;
    let n = w.len();
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let dw: Vec<C64> = (0..n)
        .map(|k| {
            let at = |o: isize| w[((k as isize + o).rem_euclid(n as isize)) as usize];
            (at(-2) - at(-1) * 8.0 + at(1) * 8.0 - at(2)) / (12.0 * h * nodes[k].jacobian)
        })
        .collect();
    Ok((nodes, w, dw))
}

/// Regularity of `W[mu]` for test densities on a curve: seminorms of the
/// tangential derivative against the predicted modulus at levels
/// `level - 1` and `level`, and against a deliberately stronger modulus.
pub fn regularity_report(
    s: &FundamentalSolution,
    m: &BoundaryManifold,
    densities: &[Density],
    beta: f64,
    level: u32,
    cfg: &EstimatorConfig,
) -> Result<RegularityReport> {
    if m.dim() != 2 {
        return Err(Error::UnsupportedKind(format!("regularity report on `{}`: curves only", m.id())));
    }
    let dl = DoubleLayer::new(s, m)?;
    let n = m.dim();
    let levels: Vec<u32> = vec![level.max(1) - 1, level.max(1)];
    let quad_level = level.max(1) + 1;
    let mut out = Vec::new();
    for mu in densities {
        let b = mu.beta.unwrap_or(beta);
        // kernel tangential gradient in K_{n-1, n, 1}
        let class = iokreg_classify(n, (n - 2) as f64, (n - 1) as f64, n as f64, 1.0, b)?;
        let modulus = class.target_modulus.clone();
        let strong = if b < 1.0 { Modulus::Power(b + 0.1) } else { Modulus::Power(1.0) };
        let mut seminorm_trace = vec![];
        let mut ratio_trace = vec![];
        let mut strong_trace = vec![];
        let mut table = vec![];
        let mut strong_table = vec![];
        for &l in &levels {
            let (nodes, w, dw) = w_and_derivative(&dl, mu, l, quad_level)?;
            let (semi, rows) = nodal_seminorm(&dw, &nodes, m, &modulus, cfg);
            let (semi_s, rows_s) = nodal_seminorm(&dw, &nodes, m, &strong, cfg);
            let muv: Vec<C64> = nodes.iter().map(|p| (mu.f)(p)).collect();
            let (mu_semi, _) = nodal_seminorm(&muv, &nodes, m, &Modulus::Power(b), cfg);
            let sup = |v: &[C64]| v.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let num = sup(&w) + sup(&dw) + semi;
            let den = sup(&muv) + mu_semi;
            seminorm_trace.push((l, semi));
            strong_trace.push((l, semi_s));
            ratio_trace.push((l, if den > 0.0 { num / den } else { 0.0 }));
            table = rows;
            strong_table = rows_s;
        }
        let drift = |t: &[(u32, f64)]| relative_drift(t[0].1, t[1].1, cfg.zero_floor);
        let growth = if strong_trace[0].1 > cfg.zero_floor { strong_trace[1].1 / strong_trace[0].1 - 1.0 } else { 0.0 };
        out.push(DensityRegularity {
            density: mu.name.clone(),
            beta: b,
            smooth: mu.beta.is_none(),
            classification: class.label(),
            modulus: modulus.clone(),
            stable: drift(&seminorm_trace) <= cfg.stability,
            ratio: ratio_trace[1].1,
            ratio_stable: drift(&ratio_trace) <= cfg.stability,
            seminorm_trace,
            ratio_trace,
            strong_modulus: strong.clone(),
            strong_trace,
            strong_growth: growth,
            scale_table: table,
            strong_scale_table: strong_table,
        });
    }
    Ok(RegularityReport {
        operator: s.id(),
        boundary: m.id().to_string(),
        beta,
        levels,
        quadrature_level: quad_level,
        densities: out,
    })
}

/// Parameter of a curve node, for CSV output.
pub fn node_param(p: &BoundaryPoint) -> f64 {
    match p.param {
        Param::Angle(t) => t,
        Param::Dir(_) => p.param.scalar(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundsol::{catalog_construct, CatalogKind};
    use std::f64::consts::E;

    fn circle() -> BoundaryManifold {
        BoundaryManifold::parse("circle:R=1").unwrap()
    }

    #[test]
    fn omega_theta_values() {
        assert!((omega_theta(1.0, 1.0 / E).unwrap() - 1.0 / E).abs() < 1e-16);
        assert_eq!(omega_theta(0.3, 0.0).unwrap(), 0.0);
        for r in [E.powi(-2), 0.5, 3.0] {
            assert!((omega_theta(0.5, r).unwrap() - 2.0 / E).abs() < 1e-15);
        }
        assert!(matches!(omega_theta(0.0, 0.1), Err(Error::BadTheta(_))));
        assert!(matches!(omega_theta(1.5, 0.1), Err(Error::BadTheta(_))));
    }

    #[test]
    fn omega_theta_is_increasing_and_concave() {
        for theta in [0.1f64, 0.5, 1.0] {
            let rt = (-1.0 / theta).exp();
            let grid: Vec<f64> = (1..=400).map(|i| 2.0 * rt * i as f64 / 400.0).collect();
            let v: Vec<f64> = grid.iter().map(|r| omega_theta(theta, *r).unwrap()).collect();
            for w in v.windows(2) {
                assert!(w[1] >= w[0]);
            }
            for w in v.windows(3) {
                assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-12, "theta {theta}");
            }
        }
    }

    #[test]
    fn omega_theta_embedding_inequalities() {
        for theta in [0.25, 0.5, 1.0] {
            let grid: Vec<f64> = (0..200).map(|i| 10f64.powf(-12.0 + 12.0 * i as f64 / 199.0)).collect();
            for r in grid.iter().filter(|r| **r <= (-1.0f64).exp()) {
                assert!(r.powf(theta) * r.ln().abs() >= r.powf(theta));
            }
            let tp = 0.5 * theta;
            let c = grid.iter().map(|r| omega_theta(theta, *r).unwrap() / r.powf(tp)).fold(0.0, f64::max);
            assert!(c.is_finite());
        }
    }

    #[test]
    fn moduli_pass_the_grid_check() {
        for m in [
            Modulus::Power(0.5),
            Modulus::Power(1.0),
            Modulus::OmegaTheta(1.0),
            Modulus::OmegaTheta(0.2),
            Modulus::Max(vec![Modulus::Power(0.7), Modulus::OmegaTheta(0.5)]),
        ] {
            let c = m.check();
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn seminorms_on_the_circle() {
        let m = circle();
        let cfg = EstimatorConfig::default();
        let zero = holder_seminorm(&|_| C64::from(3.0), &m, &Modulus::Power(0.5), 1, 1, &cfg);
        assert_eq!(zero.seminorm, 0.0);
        let lip = holder_seminorm(&|p: &BoundaryPoint| C64::from(p.x[0]), &m, &Modulus::Power(1.0), 1, 2, &cfg);
        assert!((lip.seminorm - 1.0).abs() < 0.02 && lip.seminorm <= 1.0 + 1e-12, "{}", lip.seminorm);
        let half = |p: &BoundaryPoint| C64::from((0.5 * p.param.angle()).sin().abs().sqrt());
        let a = holder_seminorm(&half, &m, &Modulus::Power(0.5), 1, 3, &cfg);
        assert!(a.stable && (a.seminorm - 0.5f64.sqrt()).abs() < 1e-3, "{:?}", a.trace);
        let b = holder_seminorm(&half, &m, &Modulus::Power(0.6), 1, 3, &cfg);
        assert!(!b.stable, "{:?}", b.trace);
    }

    #[test]
    fn reparametrisation_does_not_change_seminorms() {
        let cfg = EstimatorConfig::default();
        let f = |p: &BoundaryPoint| C64::from(p.x[0] * p.x[0] - 0.5 * p.x[1]);
        let a = holder_seminorm(&f, &circle(), &Modulus::Power(1.0), 3, 3, &cfg).seminorm;
        let warped = BoundaryManifold::parse("circle:R=1,warp=0.4").unwrap();
        let b = holder_seminorm(&f, &warped, &Modulus::Power(1.0), 3, 3, &cfg).seminorm;
        assert!((a - b).abs() <= 0.02 * a.max(b), "{a} {b}");
    }

    #[test]
    fn remark_bound() {
        let m = circle();
        let r = remark_bound_check(&|_| C64::from(1.0), &m, &Modulus::Power(1.0), 1.0, 1, 1000);
        assert!(r.passed && r.max_quotient == 0.0 && (r.bound - 2.0).abs() < 1e-15);
        let r = remark_bound_check(&|p: &BoundaryPoint| C64::from(p.x[0]), &m, &Modulus::OmegaTheta(1.0), 0.5, 2, 4000);
        assert!(r.passed && r.samples > 0);
    }

    #[test]
    fn paper_cases() {
        let (alpha, beta) = (0.75, 0.5);
        let c = iokreg_classify(3, 1.0, 3.0 - alpha, 3.0, alpha, beta).unwrap();
        assert_eq!((c.case, c.sub), (MainCase::III, SubCase::C));
        assert_eq!(c.target_modulus, Modulus::Power(alpha + beta - 1.0));
        let c = iokreg_classify(3, 1.0, 2.0, 3.0, 1.0, 0.5).unwrap();
        assert_eq!((c.case, c.sub, c.target_modulus), (MainCase::II, SubCase::B, Modulus::Power(0.5)));
        let c = iokreg_classify(3, 1.0, 2.0, 3.0, 1.0, 1.0).unwrap();
        assert_eq!((c.case, c.sub), (MainCase::II, SubCase::Bb));
        assert_eq!(c.target_modulus, Modulus::Max(vec![Modulus::Power(1.0), Modulus::OmegaTheta(1.0)]));
        // max{r, omega_1} = omega_1 near zero
        for r in [1e-6, 1e-3, 0.2] {
            assert_eq!(c.target_modulus.eval(r), omega_theta(1.0, r).unwrap());
        }
        assert!(matches!(iokreg_classify(3, 2.5, 2.0, 3.0, 1.0, 0.5), Err(Error::HypothesisViolated(_))));
        assert!(matches!(iokreg_classify(3, 1.0, 2.0, 2.2, 1.0, 0.5), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn regularity_on_the_circle() {
        let s = catalog_construct(&CatalogKind::Laplace, 2).unwrap();
        let m = circle();
        let cfg = EstimatorConfig::default();
        let dens = vec![
            Density::trig("cos", vec![0.0, 1.0], vec![]),
            Density::trig("zero", vec![0.0], vec![]),
        ];
        let r = regularity_report(&s, &m, &dens, 0.5, 2, &cfg).unwrap();
        let d = &r.densities[0];
        assert!(d.stable && d.ratio_stable && d.ratio.is_finite(), "{d:?}");
        assert_eq!(r.densities[1].seminorm_trace[1].1, 0.0);
        let r2 = regularity_report(&s, &m, &[Density::trig("cos", vec![0.0, 1.0], vec![]).scaled(4.0)], 0.5, 2, &cfg).unwrap();
        assert_eq!(r2.densities[0].ratio, d.ratio);
    }
}
