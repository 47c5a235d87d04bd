//! Batch verification runs: configuration, suites, reports and plot data.
//!
//! A run resolves an operator and a boundary from their ids, executes the
//! selected suites in a fixed order and writes `report.json`, `summary.txt`
//! and one CSV file per curve into the output directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::dlp::{self, DlpKernel, DoubleLayer, TangentialGradientKernel, TWO_ROUTE_TOL};
use crate::error::{Error, Result};
use crate::fundsol::{catalog_construct, CatalogKind, FundamentalSolution};
use crate::geometry::{BoundaryManifold, ShapeKind};
use crate::holder::{self, Density, EstimatorConfig};
use crate::kernelclass::{class_norm, magnitude, verify_kernel_algebra, Exponents, KernelClassEstimate};
use crate::sampling::{relative_drift, Sampler};
use crate::C64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 2;
pub const EXIT_CONVERGENCE_FAILURE: i32 = 3;
pub const EXIT_CONFIG_ERROR: i32 = 4;

/// Exit code for an error raised outside the suites.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::QuadratureNotConverged { .. } => EXIT_CONVERGENCE_FAILURE,
        Error::KernelEvaluationFailure(_) | Error::OriginEvaluation | Error::CoincidentPoints => EXIT_CHECK_FAILURE,
        _ => EXIT_CONFIG_ERROR,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Structure,
    KernelClass,
    Dlp,
    Maximal,
    Regularity,
    All,
}

impl Suite {
    pub const ORDER: [Suite; 5] = [Suite::Structure, Suite::KernelClass, Suite::Dlp, Suite::Maximal, Suite::Regularity];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::KernelClass => "kernel-class",
            Suite::Dlp => "dlp",
            Suite::Maximal => "maximal",
            Suite::Regularity => "regularity",
            Suite::All => "all",
        }
    }

    fn expand(self) -> Vec<Suite> {
        if self == Suite::All {
            Self::ORDER.to_vec()
        } else {
            vec![self]
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ORDER
            .iter()
            .chain([Suite::All].iter())
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}` (structure, kernel-class, dlp, maximal, regularity, all)")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub operator: String,
    pub boundary: String,
    pub suite: Suite,
    pub level: u32,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
    /// Allowed drift across the final two refinement levels, in percent.
    pub stability_pct: f64,
    /// Hoelder exponent of the non-smooth test density.
    pub beta: f64,
    /// Pair count for the two-route kernel check.
    pub two_route_pairs: usize,
    /// Sample count for the kernel algebra checks.
    pub algebra_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            operator: "laplace".into(),
            boundary: "circle:R=1".into(),
            suite: Suite::All,
            level: 2,
            seed: 1,
            out: PathBuf::from("out"),
            stability_pct: 5.0,
            beta: 0.5,
            two_route_pairs: 10_000,
            algebra_samples: 10_000,
        }
    }
}

pub const MAX_LEVEL: u32 = 5;

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected key = value, got `{raw}`", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}`")))
        }
        match key.replace('-', "_").as_str() {
            "operator" => self.operator = value.to_string(),
            "boundary" => self.boundary = value.to_string(),
            "suite" => self.suite = value.parse()?,
            "level" => self.level = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "stability_pct" => self.stability_pct = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "two_route_pairs" => self.two_route_pairs = num(key, value)?,
            "algebra_samples" => self.algebra_samples = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.level > MAX_LEVEL {
            return Err(Error::Config(format!("level {} outside [0, {MAX_LEVEL}]", self.level)));
        }
        if !(self.stability_pct > 0.0 && self.stability_pct.is_finite()) {
            return Err(Error::Config(format!("stability-pct must be positive, got {}", self.stability_pct)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Config(format!("beta must lie in ]0, 1], got {}", self.beta)));
        }
        Ok(())
    }

    fn stability(&self) -> f64 {
        self.stability_pct / 100.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub artifact: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    NotConverged,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub gated: bool,
    pub outcome: Outcome,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub columns: [String; 2],
    pub rows: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodalRow {
    pub node_index: usize,
    pub u_param: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub provenance: Provenance,
    /// Excluded from reproducibility comparisons.
    pub timestamp: String,
    pub status: &'static str,
    pub exit_code: i32,
    pub failed_gated: usize,
    pub checks: Vec<Check>,
    pub suites: BTreeMap<String, Value>,
    pub curves: BTreeMap<String, Curve>,
    pub nodal: BTreeMap<String, Vec<NodalRow>>,
}

struct Run<'a> {
    cfg: &'a RunConfig,
    s: &'a FundamentalSolution,
    m: &'a BoundaryManifold,
    checks: Vec<Check>,
    suites: BTreeMap<String, Value>,
    curves: BTreeMap<String, Curve>,
    nodal: BTreeMap<String, Vec<NodalRow>>,
}

fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

impl<'a> Run<'a> {
    fn check(&mut self, suite: Suite, name: &str, gated: bool, passed: bool, value: f64, threshold: f64, detail: String) {
        self.checks.push(Check {
            suite: suite.name(),
            name: name.to_string(),
            gated,
            outcome: if passed { Outcome::Pass } else { Outcome::Fail },
            value,
            threshold,
            detail,
        });
    }

    /// Records a suite error as a failed gated check.
    fn error(&mut self, suite: Suite, e: &Error) {
        let outcome = if matches!(e, Error::QuadratureNotConverged { .. }) { Outcome::NotConverged } else { Outcome::Fail };
        let value = match e {
            Error::QuadratureNotConverged { change, .. } => *change,
            _ => f64::NAN,
        };
        self.checks.push(Check {
            suite: suite.name(),
            name: "suite-error".into(),
            gated: true,
            outcome,
            value,
            threshold: f64::NAN,
            detail: e.to_string(),
        });
    }

    fn skip(&mut self, suite: Suite, reason: &str) {
        self.checks.push(Check {
            suite: suite.name(),
            name: "skipped".into(),
            gated: false,
            outcome: Outcome::Skipped,
            value: 0.0,
            threshold: 0.0,
            detail: reason.into(),
        });
    }

    fn levels(&self) -> u32 {
        self.cfg.level.max(1)
    }

    fn structure(&mut self) -> Result<()> {
        let r = self.s.verify_structure(64);
        let st = Suite::Structure;
        self.check(st, "b1-zero-at-origin", true, r.b1_zero_at_origin, 0.0, 0.0, String::new());
        self.check(st, "odd-dimension-nullity", true, r.odd_dimension_nullity, 0.0, 0.0, String::new());
        let tol = crate::fundsol::STRUCTURE_SYMMETRY_TOL;
        self.check(st, "a1-odd", true, r.a1_odd_residual <= tol, r.a1_odd_residual, tol, String::new());
        self.check(st, "a2-even", true, r.a2_even_residual <= tol, r.a2_even_residual, tol, String::new());
        let tol = crate::fundsol::STRUCTURE_GRADIENT_TOL;
        self.check(st, "gradient-fd", true, r.gradient_fd_residual <= tol, r.gradient_fd_residual, tol, String::new());
        let tol = crate::fundsol::STRUCTURE_PDE_TOL;
        self.check(st, "pde-residual", true, r.pde_residual <= tol, r.pde_residual, tol, String::new());
        self.suites.insert(st.name().into(), json(&r));
        Ok(())
    }

    fn class_check(&mut self, name: &str, e: &KernelClassEstimate) {
        let st = Suite::KernelClass;
        let t = &e.refinement_trace;
        let k = t.len();
        let drift = |a: f64, b: f64| relative_drift(a, b, EstimatorConfig::default().zero_floor);
        let d = drift(t[k - 2].first_sup, t[k - 1].first_sup).max(drift(t[k - 2].second_sup, t[k - 1].second_sup));
        let finite = e.first_sup.is_finite() && e.second_sup.is_finite();
        self.check(st, &format!("{name}-stable"), true, finite && d <= self.cfg.stability(), d, self.cfg.stability(), format!("norm {:e}", e.norm()));
        self.curves.insert(
            format!("kernel-class/{name}/trace"),
            Curve { columns: ["level".into(), "norm".into()], rows: t.iter().map(|e| [e.level as f64, e.first_sup + e.second_sup]).collect() },
        );
    }

    fn kernel_class(&mut self) -> Result<()> {
        let dl = DoubleLayer::new(self.s, self.m)?;
        let n = self.m.dim() as f64;
        let ek = if n == 2.0 { Exponents::new(0.1, 1.1, 1.0) } else { Exponents::new(n - 2.0, n - 1.0, 1.0) };
        let eg = Exponents::new(n - 1.0, n, 1.0);
        let level = self.levels();
        let kernel = class_norm(&DlpKernel(dl), self.m, ek, self.cfg.seed, level)?;
        let grad = class_norm(&TangentialGradientKernel(dl), self.m, eg, self.cfg.seed, level)?;
        self.class_check("kernel", &kernel);
        self.class_check("tangential-gradient", &grad);
        let alg = verify_kernel_algebra(&DlpKernel(dl), ek, &DlpKernel(dl), ek, self.m, None, self.cfg.seed, self.cfg.algebra_samples)?;
        for c in &alg.checks {
            self.check(Suite::KernelClass, &format!("algebra/{}", c.name), true, c.passed, c.max_ratio, 1.0, format!("{} violations in {} samples", c.violations, c.samples));
        }
        let mut v = serde_json::Map::new();
        v.insert("kernel".into(), json(&kernel));
        v.insert("tangential_gradient".into(), json(&grad));
        v.insert("algebra".into(), json(&alg));
        self.suites.insert(Suite::KernelClass.name().into(), Value::Object(v));
        Ok(())
    }

    fn dlp(&mut self) -> Result<()> {
        let st = Suite::Dlp;
        let dl = DoubleLayer::new(self.s, self.m)?;
        let m = self.m;
        let level = self.cfg.level;
        let targets = m.surface_quadrature(0).nodes;
        let w1: Vec<C64> = targets.par_iter().map(|x| dl.eval_w1(&x.param, level)).collect::<Result<_>>()?;
        self.nodal.insert(
            "dlp/w1".into(),
            w1.iter()
                .zip(&targets)
                .enumerate()
                .map(|(i, (w, x))| NodalRow { node_index: i, u_param: holder::node_param(x), re: w.re, im: w.im })
                .collect(),
        );
        let spread = w1.iter().map(|w| (w - w1[0]).norm()).fold(0.0, f64::max);
        let gauss_tol = if m.dim() == 2 { 1e-10 } else { 1e-4 };
        if self.s.is_principal_only() {
            let err = w1.iter().map(|w| (w - C64::from(0.5)).norm()).fold(0.0, f64::max);
            self.check(st, "w1-equals-half", true, err <= gauss_tol, err, gauss_tol, format!("{} nodes", w1.len()));
        } else {
            let tol = if m.dim() == 2 { 1e-6 } else { 1e-3 };
            let mut worst: f64 = 0.0;
            for (x, a) in targets.iter().zip(&w1) {
                let b = dl.eval_w1(&x.param, level + 1)?;
                worst = worst.max((a - b).norm() / b.norm().max(1.0));
            }
            if worst > tol {
                return Err(Error::QuadratureNotConverged { change: worst, tol });
            }
            self.check(st, "w1-converged", true, true, worst, tol, "levels L and L+1".into());
        }
        let round = matches!(m.kind(), ShapeKind::Circle { .. } | ShapeKind::Sphere { .. });
        self.check(st, "w1-spread", round, !round || spread <= gauss_tol, spread, gauss_tol, "gated on circles and spheres".into());

        // two-route kernel identity, floor 1e-3 diam
        let convex = !matches!(m.kind(), ShapeKind::Star { .. });
        let sampler = Sampler::new(m, self.cfg.seed).with_floor(1e-3);
        let chunks = self.cfg.two_route_pairs.div_ceil(crate::sampling::CHUNK) as u64;
        let res: Vec<f64> = (0..chunks)
            .into_par_iter()
            .map(|c| sampler.pair_chunk(c).iter().map(|p| dl.two_route_residual(&p.x, &p.y)).try_fold(0.0f64, |a, r| r.map(|r| a.max(r))))
            .collect::<Result<_>>()?;
        let worst = res.iter().cloned().fold(0.0, f64::max);
        self.check(
            st,
            "two-route-kernel",
            convex,
            worst <= TWO_ROUTE_TOL,
            worst,
            TWO_ROUTE_TOL,
            format!("{} pairs{}", chunks as usize * crate::sampling::CHUNK, if convex { "" } else { "; not gated on non-convex boundaries" }),
        );

        // tangential gradient against differences of the kernel
        let diam = m.diameter();
        let (worst, count) = tangential_gradient_fd_check(&dl, self.cfg.seed, 0.1 * diam, 200)?;
        self.check(st, "tangential-gradient-fd", true, worst <= 1e-6 && count >= 200, worst, 1e-6, format!("{count} pairs"));

        let sb = dlp::singular_bound_report(&dl, 0.5, self.cfg.seed, level.min(2))?;
        let mut v = serde_json::Map::new();
        v.insert("w1_max_spread".into(), json(&spread));
        v.insert("two_route_max_residual".into(), json(&worst));
        v.insert("singular_bounds".into(), json(&sb));
        self.suites.insert(st.name().into(), Value::Object(v));
        Ok(())
    }

    fn maximal(&mut self) -> Result<()> {
        let st = Suite::Maximal;
        let dl = DoubleLayer::new(self.s, self.m)?;
        let radii = dlp::maximal_radii(self.m);
        let l = self.levels();
        let a = dlp::maximal_function_condition(&dl, l - 1, &radii)?;
        let b = dlp::maximal_function_condition(&dl, l, &radii)?;
        let d = relative_drift(a.sup, b.sup, 1e-10);
        self.check(st, "maximal-stable", true, b.sup.is_finite() && d <= self.cfg.stability(), d, self.cfg.stability(), format!("sup {:e}", b.sup));
        self.curves.insert(
            "maximal/curve".into(),
            Curve { columns: ["r".into(), "integral".into()], rows: b.curve.iter().map(|(r, v)| [*r, *v]).collect() },
        );
        let mut v = serde_json::Map::new();
        v.insert("coarse".into(), json(&a));
        v.insert("fine".into(), json(&b));
        self.suites.insert(st.name().into(), Value::Object(v));
        Ok(())
    }

    fn regularity(&mut self) -> Result<()> {
        let st = Suite::Regularity;
        if self.m.dim() != 2 {
            self.skip(st, "regularity reports are computed on curves only");
            return Ok(());
        }
        let cfg = EstimatorConfig { stability: self.cfg.stability(), ..Default::default() };
        let densities = default_densities(self.cfg.beta);
        let r = holder::regularity_report(self.s, self.m, &densities, self.cfg.beta, self.levels(), &cfg)?;
        for (i, d) in r.densities.iter().enumerate() {
            let k = d.seminorm_trace.len();
            let drift = relative_drift(d.seminorm_trace[k - 2].1, d.seminorm_trace[k - 1].1, cfg.zero_floor);
            let tag = format!("mu{i}");
            self.check(st, &format!("{tag}-seminorm-stable"), true, d.stable, drift, cfg.stability, format!("{} against {}", d.density, d.modulus.label()));
            let rd = relative_drift(d.ratio_trace[k - 2].1, d.ratio_trace[k - 1].1, cfg.zero_floor);
            self.check(st, &format!("{tag}-ratio-stable"), true, d.ratio_stable, rd, cfg.stability, format!("ratio {:e}", d.ratio));
            if !d.smooth {
                self.check(
                st,
                &format!("{tag}-strong-modulus-growth"),
                false,
                d.strong_growth >= 0.25,
                d.strong_growth,
                0.25,
                format!("diagnostic: {} should not stabilise", d.strong_modulus.label()),
            );
            }
            let table = |rows: &[holder::ScaleRow]| Curve {
                columns: ["separation".into(), "quotient".into()],
                rows: rows.iter().map(|r| [r.separation, r.max_quotient]).collect(),
            };
            self.curves.insert(format!("regularity/{tag}/scale_table"), table(&d.scale_table));
            self.curves.insert(format!("regularity/{tag}/strong_scale_table"), table(&d.strong_scale_table));
        }
        self.suites.insert(st.name().into(), json(&r));
        Ok(())
    }
}

/// Tangential gradient of the kernel against central differences, over
/// sampled pairs with separation at least `min_sep`. Returns the largest
/// relative error and the number of pairs checked.
pub fn tangential_gradient_fd_check(dl: &DoubleLayer, seed: u64, min_sep: f64, want: usize) -> Result<(f64, usize)> {
    let sampler = Sampler::new(dl.manifold(), seed);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut chunk = 0;
    while count < want && chunk < 64 {
        let pairs: Vec<_> = sampler.pair_chunk(chunk).into_iter().filter(|p| p.dist >= min_sep).collect();
        let errs: Vec<f64> = pairs
            .par_iter()
            .map(|p| {
                let g = dl.tangential_gradient(&p.x, &p.y)?;
                let fd = dl.tangential_gradient_fd(&p.x, &p.y)?;
                let k = dl.kernel(&p.x, &p.y)?.norm();
                // differencing noise of a kernel of size |K| when the gradient vanishes
                Ok(magnitude(&(g - fd)) / magnitude(&g).max(1e-4 * k).max(f64::MIN_POSITIVE))
            })
            .collect::<Result<_>>()?;
        for e in errs {
            worst = worst.max(e);
        }
        count += pairs.len();
        chunk += 1;
    }
    Ok((worst, count))
}

/// A smooth trigonometric density and a kink of exponent `beta`.
pub fn default_densities(beta: f64) -> Vec<Density> {
    vec![
        Density::trig("cos(t)+0.3sin(2t)", vec![0.0, 1.0], vec![0.0, 0.0, 0.3]),
        Density::kink(&format!("|sin((t-0.7)/2)|^{beta}"), 0.7, beta),
    ]
}

/// Parses ids and runs the configured suites. Config errors are returned;
/// suite failures are recorded in the report.
pub fn run_suite(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let kind = CatalogKind::parse(&cfg.operator)?;
    let m = BoundaryManifold::parse(&cfg.boundary)?;
    let s = catalog_construct(&kind, m.dim())?;
    let mut run = Run { cfg, s: &s, m: &m, checks: vec![], suites: BTreeMap::new(), curves: BTreeMap::new(), nodal: BTreeMap::new() };
    for suite in cfg.suite.expand() {
        let r = match suite {
            Suite::Structure => run.structure(),
            Suite::KernelClass => run.kernel_class(),
            Suite::Dlp => run.dlp(),
            Suite::Maximal => run.maximal(),
            Suite::Regularity => run.regularity(),
            Suite::All => unreachable!(),
        };
        if let Err(e) = r {
            run.error(suite, &e);
        }
    }
    let failed: Vec<&Check> = run.checks.iter().filter(|c| c.gated && !matches!(c.outcome, Outcome::Pass | Outcome::Skipped)).collect();
    let (status, code) = if failed.iter().any(|c| c.outcome == Outcome::NotConverged) {
        ("convergence-failure", EXIT_CONVERGENCE_FAILURE)
    } else if !failed.is_empty() {
        ("check-failure", EXIT_CHECK_FAILURE)
    } else {
        ("ok", EXIT_OK)
    };
    let failed_gated = failed.len();
    Ok(Report {
        provenance: Provenance { artifact: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), config: cfg.clone() },
        timestamp: timestamp(),
        status,
        exit_code: code,
        failed_gated,
        checks: run.checks,
        suites: run.suites,
        curves: run.curves,
        nodal: run.nodal,
    })
}

fn timestamp() -> String {
    let t = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap_or_default();
    format!("unix:{}.{:03}", t.as_secs(), t.subsec_millis())
}

/// 17 significant digits; parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn curve_file_name(name: &str) -> String {
    format!("{}.csv", name.replace('/', "__"))
}

pub fn curve_csv(c: &Curve) -> String {
    let mut rows = c.rows.clone();
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut s = format!("{},{}\n", c.columns[0], c.columns[1]);
    for r in rows {
        let _ = writeln!(s, "{},{}", fmt_f64(r[0]), fmt_f64(r[1]));
    }
    s
}

pub fn summary_text(r: &Report) -> String {
    let c = &r.provenance.config;
    let mut s = String::new();
    let _ = writeln!(s, "operator  {}", c.operator);
    let _ = writeln!(s, "boundary  {}", c.boundary);
    let _ = writeln!(s, "suite     {}  level {}  seed {}", c.suite.name(), c.level, c.seed);
    let _ = writeln!(s, "status    {} (exit {}), {} failed gated checks", r.status, r.exit_code, r.failed_gated);
    let _ = writeln!(s);
    for ch in &r.checks {
        let mark = match ch.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::NotConverged => "NCNV",
            Outcome::Skipped => "SKIP",
        };
        let gate = if ch.gated { ' ' } else { '~' };
        let _ = writeln!(s, "{mark}{gate} {:<13} {:<40} {:>12.4e} / {:<10.3e} {}", ch.suite, ch.name, ch.value, ch.threshold, ch.detail);
    }
    s
}

/// Serialises a report; the timestamp stays on its own line so it can be
/// dropped when comparing runs.
pub fn report_json(r: &Report) -> String {
    serde_json::to_string_pretty(r).expect("report serialises") + "\n"
}

/// Removes the timestamp field from serialised report text.
pub fn strip_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\":")).collect::<Vec<_>>().join("\n")
}

/// Writes `report.json`, `summary.txt` and `curves/*.csv`.
pub fn write_outputs(r: &Report, out: &Path) -> Result<()> {
    let curves = out.join("curves");
    fs::create_dir_all(&curves)?;
    fs::write(out.join("report.json"), report_json(r))?;
    fs::write(out.join("summary.txt"), summary_text(r))?;
    for (name, c) in &r.curves {
        fs::write(curves.join(curve_file_name(name)), curve_csv(c))?;
    }
    for (name, rows) in &r.nodal {
        let mut s = String::from("node_index,u_param,re,im\n");
        for row in rows {
            let _ = writeln!(s, "{},{},{},{}", row.node_index, fmt_f64(row.u_param), fmt_f64(row.re), fmt_f64(row.im));
        }
        fs::write(curves.join(curve_file_name(name)), s)?;
    }
    Ok(())
}

/// Two-column CSV of the curve `selector` from a report file.
pub fn emit_plot_data(report: &Path, selector: &str) -> Result<String> {
    let text = fs::read_to_string(report).map_err(|e| Error::MalformedReport(format!("{}: {e}", report.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::MalformedReport(e.to_string()))?;
    let curves = v.get("curves").and_then(Value::as_object).ok_or_else(|| Error::MalformedReport("no `curves` object".into()))?;
    let c = curves.get(selector).ok_or_else(|| Error::MissingCurve(selector.to_string()))?;
    let bad = || Error::MalformedReport(format!("curve `{selector}` is not a two-column table"));
    let cols = c.get("columns").and_then(Value::as_array).ok_or_else(bad)?;
    let col = |i: usize| cols.get(i).and_then(Value::as_str).map(String::from).ok_or_else(bad);
    let rows = c
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(bad)?
        .iter()
        .map(|r| {
            let r = r.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
            let f = |x: &Value| x.as_f64().ok_or_else(bad);
            Ok([f(&r[0])?, f(&r[1])?])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(curve_csv(&Curve { columns: [col(0)?, col(1)?], rows }))
}

/// Parses two-column CSV produced by [`emit_plot_data`].
pub fn parse_curve_csv(text: &str) -> Result<Vec<[f64; 2]>> {
    text.lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').ok_or_else(|| Error::MalformedReport(format!("bad row `{l}`")))?;
            let p = |s: &str| s.parse::<f64>().map_err(|_| Error::MalformedReport(format!("bad number `{s}`")));
            Ok([p(a)?, p(b)?])
        })
        .collect()
}

/// Catalog listing for `--list`.
pub fn listing() -> String {
    let mut s = String::from("operators:\n");
    for (id, what) in CatalogKind::listing() {
        let _ = writeln!(s, "  {id:<44} {what}");
    }
    s.push_str("boundaries:\n");
    for (id, what) in [
        ("circle:R=1[,warp=0.3]", "circle, optionally reparametrised by t + warp sin t"),
        ("ellipse:a=2,b=1", "ellipse with semi-axes a, b"),
        ("star:c=0.2,k=5", "r(t) = 1 + c cos(k t), |c| < 1"),
        ("sphere:R=1", "sphere"),
        ("ellipsoid:a=1,b=1,c=2", "ellipsoid with semi-axes a, b, c"),
    ] {
        let _ = writeln!(s, "  {id:<44} {what}");
    }
    s.push_str("suites: structure, kernel-class, dlp, maximal, regularity, all\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_file_text("# comment\noperator = yukawa2d:lambda=2 # trailing\n\nlevel=3\nsuite = dlp\nstability-pct = 2.5\n").unwrap();
        assert_eq!(c.operator, "yukawa2d:lambda=2");
        assert_eq!((c.level, c.suite, c.stability_pct), (3, Suite::Dlp, 2.5));
        assert!(matches!(c.apply_file_text("level"), Err(Error::Config(_))));
        assert!(matches!(c.set("colour", "red"), Err(Error::Config(_))));
        c.level = 6;
        assert!(c.validate().is_err());
    }

    #[test]
    fn malformed_boundary_is_a_config_error_naming_the_parameter() {
        let cfg = RunConfig { boundary: "circle:R=-1".into(), suite: Suite::Structure, ..Default::default() };
        let e = run_suite(&cfg).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG_ERROR);
        assert!(e.to_string().contains('R'), "{e}");
    }

    #[test]
    fn structure_suite_passes() {
        let cfg = RunConfig { suite: Suite::Structure, ..Default::default() };
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.exit_code, EXIT_OK, "{}", summary_text(&r));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let c = Curve { columns: ["separation".into(), "quotient".into()], rows: vec![[0.1 + 0.2, 1.0 / 3.0], [1e-300, 5e-324], [2.0, f64::MAX]] };
        let back = parse_curve_csv(&curve_csv(&c)).unwrap();
        let mut want = c.rows.clone();
        want.sort_by(|a, b| a[0].total_cmp(&b[0]));
        for (a, b) in back.iter().zip(&want) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
            assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
    }

    #[test]
    fn timestamp_stripping() {
        let t = "{\n  \"a\": 1,\n  \"timestamp\": \"unix:5\",\n  \"b\": 2\n}";
        assert_eq!(strip_timestamp(t), "{\n  \"a\": 1,\n  \"b\": 2\n}");
    }
}
