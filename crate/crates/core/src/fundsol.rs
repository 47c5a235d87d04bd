//! Fundamental solutions in structured form
//!
//! ```text
//! S(x) = det(a2)^{-1/2} S_n(T^{-1} x) + |x|^{3-n} A1(x/|x|, |x|)
//!        + (B1(x) + b0 (1 - delta_{2n})) ln|x| + C(x)
//! DS(x) = (s_n sqrt(det a2))^{-1} |T^{-1}x|^{-n} x^t a2^{-1}
//!        + |x|^{2-n} A2(x/|x|, |x|) + DB1(x) ln|x| + DC(x)
//! ```
//!
//! Each catalog entry supplies A1, A2, B1, C in closed form together with the
//! derivatives consumed by the tangential gradient of the double layer kernel.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bessel::{self, EULER_GAMMA};
use crate::coeffs::{principal_factor, OperatorCoefficients, PrincipalFactor};
use crate::error::{Error, Result};
use crate::ids::parse_id;
use crate::{cmat, cvec, CMat3, CVec3, Mat3, Vec3, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Measure of the unit sphere in R^n.
pub fn unit_sphere_measure(n: usize) -> f64 {
    match n {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => f64::NAN,
    }
}

/// Fundamental solution of the Laplacian.
pub fn laplace_sn(x: &Vec3, n: usize) -> Result<f64> {
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::OriginEvaluation);
    }
    match n {
        2 => Ok(r.ln() / (2.0 * PI)),
        3 => Ok(-1.0 / (4.0 * PI * r)),
        _ => Err(Error::BadDimension(n)),
    }
}

/// Identity on the first `n` coordinates.
pub fn eye(n: usize) -> Mat3 {
    let mut m = Mat3::zeros();
    for i in 0..n.min(3) {
        m[(i, i)] = 1.0;
    }
    m
}

/// Operators with a closed-form structured fundamental solution.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogKind {
    Laplace,
    /// Principal part only, with the given symmetric matrix.
    Anisotropic(Mat3),
    /// `Delta - lambda^2` in three dimensions.
    Yukawa3d { lambda: f64 },
    /// `Delta + k^2` in three dimensions, radiating solution.
    Helmholtz3d { k: f64 },
    /// `Delta - lambda^2` in two dimensions.
    Yukawa2d { lambda: f64 },
    /// `Delta + b . grad` in three dimensions.
    Advection3d { b: [f64; 3] },
}

impl CatalogKind {
    pub fn parse(id: &str) -> Result<Self> {
        let p = parse_id(id)?;
        let positive = |key: &str| -> Result<f64> {
            let v = p.require(key)?;
            if v <= 0.0 {
                return Err(Error::Config(format!("`{}` needs {key} > 0, got {v}", p.name)));
            }
            Ok(v)
        };
        match p.name.as_str() {
            "laplace" => {
                p.reject_unknown(&[])?;
                Ok(CatalogKind::Laplace)
            }
            "anisotropic" => {
                p.reject_unknown(&["a11", "a22", "a33", "a12", "a13", "a23"])?;
                let g = |k: &str, d: f64| p.get(k).unwrap_or(d);
                let m = Mat3::new(
                    g("a11", 1.0),
                    g("a12", 0.0),
                    g("a13", 0.0),
                    g("a12", 0.0),
                    g("a22", 1.0),
                    g("a23", 0.0),
                    g("a13", 0.0),
                    g("a23", 0.0),
                    g("a33", 1.0),
                );
                Ok(CatalogKind::Anisotropic(m))
            }
            "yukawa3d" => {
                p.reject_unknown(&["lambda"])?;
                Ok(CatalogKind::Yukawa3d { lambda: positive("lambda")? })
            }
            "helmholtz3d" => {
                p.reject_unknown(&["k"])?;
                Ok(CatalogKind::Helmholtz3d { k: positive("k")? })
            }
            "yukawa2d" => {
                p.reject_unknown(&["lambda"])?;
                Ok(CatalogKind::Yukawa2d { lambda: positive("lambda")? })
            }
            "advection3d" => {
                p.reject_unknown(&["b1", "b2", "b3"])?;
                let b = [p.get("b1").unwrap_or(0.0), p.get("b2").unwrap_or(0.0), p.get("b3").unwrap_or(0.0)];
                if b.iter().all(|v| *v == 0.0) {
                    return Err(Error::Config("`advection3d` needs a nonzero drift".into()));
                }
                Ok(CatalogKind::Advection3d { b })
            }
            other => Err(Error::UnsupportedKind(other.to_string())),
        }
    }

    pub fn id(&self) -> String {
        match self {
            CatalogKind::Laplace => "laplace".into(),
            CatalogKind::Anisotropic(m) => format!(
                "anisotropic:a11={},a22={},a33={},a12={},a13={},a23={}",
                m[(0, 0)],
                m[(1, 1)],
                m[(2, 2)],
                m[(0, 1)],
                m[(0, 2)],
                m[(1, 2)]
            ),
            CatalogKind::Yukawa3d { lambda } => format!("yukawa3d:lambda={lambda}"),
            CatalogKind::Helmholtz3d { k } => format!("helmholtz3d:k={k}"),
            CatalogKind::Yukawa2d { lambda } => format!("yukawa2d:lambda={lambda}"),
            CatalogKind::Advection3d { b } => format!("advection3d:b1={},b2={},b3={}", b[0], b[1], b[2]),
        }
    }

    /// Dimension required by the kind, if it is tied to one.
    pub fn required_dim(&self) -> Option<usize> {
        match self {
            CatalogKind::Laplace | CatalogKind::Anisotropic(_) => None,
            CatalogKind::Yukawa2d { .. } => Some(2),
            _ => Some(3),
        }
    }

    /// Human-readable catalog listing.
    pub fn listing() -> &'static [(&'static str, &'static str)] {
        &[
            ("laplace", "Laplace operator, n = 2 or 3"),
            ("anisotropic:a11=..,a22=..,a12=..[,a33,a13,a23]", "principal part div(A grad), n = 2 or 3"),
            ("yukawa3d:lambda=..", "Delta - lambda^2, n = 3"),
            ("helmholtz3d:k=..", "Delta + k^2 (radiating), n = 3"),
            ("yukawa2d:lambda=..", "Delta - lambda^2, n = 2"),
            ("advection3d:b1=..,b2=..,b3=..", "Delta + b.grad, n = 3"),
        ]
    }
}

/// Power series in `u = |x|^2`.
#[derive(Debug, Clone, PartialEq)]
struct EvenSeries {
    c: Vec<f64>,
}

impl EvenSeries {
    /// Truncates once terms are negligible for |x| up to 12.
    fn new(mut c: Vec<f64>) -> Self {
        let umax: f64 = 144.0;
        let scale = c.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        let mut keep = c.len();
        for k in (0..c.len()).rev() {
            if (c[k].abs() * umax.powi(k as i32)) > 1e-19 * scale || k == 0 {
                keep = k + 1;
                break;
            }
        }
        c.truncate(keep);
        Self { c }
    }

    /// Returns (phi, phi', phi'').
    fn eval(&self, u: f64) -> (f64, f64, f64) {
        let (mut p, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for &ck in self.c.iter().rev() {
            d2 = d2 * u + d1;
            d1 = d1 * u + p;
            p = p * u + ck;
        }
        (p, d1, 2.0 * d2)
    }

    /// Value, gradient and Hessian of x -> phi(|x|^2).
    fn radial(&self, x: &Vec3, n: usize) -> (f64, Vec3, Mat3) {
        let (p, d1, d2) = self.eval(x.norm_squared());
        let g = 2.0 * d1 * x;
        let h = 2.0 * d1 * eye(n) + 4.0 * d2 * x * x.transpose();
        (p, g, h)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Corrections {
    None,
    /// Remainder of `-exp(kappa r)/(4 pi r)`.
    Exp3d { kappa: C64 },
    Yukawa2d { b1: EvenSeries, c: EvenSeries, psi: EvenSeries },
    Advection3d { b: Vec3, lambda: f64, c: EvenSeries },
}

/// Structured fundamental solution of a catalog operator.
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    kind: CatalogKind,
    coeffs: OperatorCoefficients,
    factor: PrincipalFactor,
    a2_inv: Mat3,
    inv_sqrt_det: f64,
    corr: Corrections,
}

/// Evaluation of A1, A2, B1 or C through a common interface.
pub trait PointField {
    fn eval(&self, x: &Vec3) -> C64;
    fn grad(&self, x: &Vec3) -> CVec3;
    fn hess(&self, x: &Vec3) -> CMat3;
}

pub struct B1Field<'a>(&'a FundamentalSolution);
pub struct CField<'a>(&'a FundamentalSolution);

impl PointField for B1Field<'_> {
    fn eval(&self, x: &Vec3) -> C64 {
        self.0.b1(x)
    }
    fn grad(&self, x: &Vec3) -> CVec3 {
        self.0.b1_grad(x)
    }
    fn hess(&self, x: &Vec3) -> CMat3 {
        self.0.b1_hess(x)
    }
}

impl PointField for CField<'_> {
    fn eval(&self, x: &Vec3) -> C64 {
        self.0.c(x)
    }
    fn grad(&self, x: &Vec3) -> CVec3 {
        self.0.c_grad(x)
    }
    fn hess(&self, x: &Vec3) -> CMat3 {
        self.0.c_hess(x)
    }
}

/// Builds the structured fundamental solution of a catalog operator.
pub fn catalog_construct(kind: &CatalogKind, n: usize) -> Result<FundamentalSolution> {
    if n != 2 && n != 3 {
        return Err(Error::BadDimension(n));
    }
    if let Some(d) = kind.required_dim() {
        if d != n {
            return Err(Error::UnsupportedKind(format!("{} requires n = {d}, got n = {n}", kind.id())));
        }
    }
    let zero = CVec3::zeros();
    let (coeffs, corr) = match kind {
        CatalogKind::Laplace => (OperatorCoefficients::laplace(n)?, Corrections::None),
        CatalogKind::Anisotropic(m) => (OperatorCoefficients::from_parts(n, *m, zero, ZERO)?, Corrections::None),
        CatalogKind::Yukawa3d { lambda } => (
            OperatorCoefficients::from_parts(3, Mat3::identity(), zero, C64::new(-lambda * lambda, 0.0))?,
            Corrections::Exp3d { kappa: C64::new(-lambda, 0.0) },
        ),
        CatalogKind::Helmholtz3d { k } => (
            OperatorCoefficients::from_parts(3, Mat3::identity(), zero, C64::new(k * k, 0.0))?,
            Corrections::Exp3d { kappa: C64::new(0.0, *k) },
        ),
        CatalogKind::Yukawa2d { lambda } => (
            OperatorCoefficients::from_parts(2, Mat3::identity(), zero, C64::new(-lambda * lambda, 0.0))?,
            yukawa2d_corrections(*lambda),
        ),
        CatalogKind::Advection3d { b } => {
            let bv = Vec3::new(b[0], b[1], b[2]);
            let lambda = 0.5 * bv.norm();
            let mut c = Vec::new();
            let mut fact = 1.0;
            for k in 0..60 {
                if k > 0 {
                    fact *= (2 * k) as f64 * (2 * k + 1) as f64;
                }
                c.push(lambda.powi(2 * k as i32 + 1) / (fact * 4.0 * PI));
            }
            (
                OperatorCoefficients::from_parts(3, Mat3::identity(), cvec(&bv), ZERO)?,
                Corrections::Advection3d { b: bv, lambda, c: EvenSeries::new(c) },
            )
        }
    };
    let factor = principal_factor(n, coeffs.a2())?;
    let mut a2_inv = coeffs.a2().try_inverse().ok_or(Error::NotPositiveDefinite)?;
    for k in n..3 {
        a2_inv[(k, k)] = 0.0;
    }
    let inv_sqrt_det = 1.0 / factor.det_a2.sqrt();
    Ok(FundamentalSolution { kind: kind.clone(), coeffs, factor, a2_inv, inv_sqrt_det, corr })
}

fn yukawa2d_corrections(lambda: f64) -> Corrections {
    let q = 0.25 * lambda * lambda;
    let lead = (0.5 * lambda).ln() + EULER_GAMMA;
    let mut b1 = vec![0.0];
    let mut c = vec![lead / (2.0 * PI)];
    let mut term = 1.0;
    let mut harmonic = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        b1.push(term / (2.0 * PI));
        c.push((lead - harmonic) * term / (2.0 * PI));
    }
    let psi = b1[1..].to_vec();
    Corrections::Yukawa2d { b1: EvenSeries::new(b1), c: EvenSeries::new(c), psi: EvenSeries::new(psi) }
}

/// `g(r) = (exp(kappa r) - 1 - kappa r)/r` and its first two derivatives.
fn exp_remainder(kappa: C64, r: f64) -> (C64, C64, C64) {
    let z = kappa * r;
    if z.norm() < 0.5 {
        // g = kappa sum_{m>=2} z^{m-1}/m!
        let (mut g, mut g1, mut g2) = (ZERO, ZERO, ZERO);
        let mut zp = C64::new(1.0, 0.0); // z^{m-2}
        let mut fact = 1.0; // m!
        let mut zm3 = ZERO; // z^{m-3}
        for m in 2..40 {
            let mf = m as f64;
            fact *= mf;
            g += kappa * zp * z / fact;
            g1 += kappa * kappa * (mf - 1.0) * zp / fact;
            if m >= 3 {
                g2 += kappa * kappa * kappa * (mf - 1.0) * (mf - 2.0) * zm3 / fact;
            }
            zm3 = if m == 2 { C64::new(1.0, 0.0) } else { zm3 * z };
            zp *= z;
            if zp.norm() / fact < 1e-18 {
                break;
            }
        }
        (g, g1, g2)
    } else {
        let e = z.exp();
        let one = C64::new(1.0, 0.0);
        let g = (e - one - z) / r;
        let num = z * e - e + one;
        let g1 = num / (r * r);
        let g2 = (z * z * e - 2.0 * num) / (r * r * r);
        (g, g1, g2)
    }
}

fn exprel(u: f64) -> f64 {
    if u.abs() < 1e-5 {
        1.0 + u * (0.5 + u / 6.0)
    } else {
        u.exp_m1() / u
    }
}

fn shc(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        let z2 = z * z;
        1.0 + z2 / 6.0 * (1.0 + z2 / 20.0)
    } else {
        z.sinh() / z
    }
}

/// `(cosh z - sinh z / z) / z^2`.
fn shc_d1(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let z2 = z * z;
        let mut s = 0.0;
        let mut zp = 1.0;
        let mut fact = 6.0; // (2k+1)! for k = 1
        for k in 1..10 {
            s += zp * 2.0 * k as f64 / fact;
            zp *= z2;
            fact *= (2 * k + 2) as f64 * (2 * k + 3) as f64;
        }
        s
    } else {
        (z.cosh() - z.sinh() / z) / (z * z)
    }
}

/// Gradient and Hessian of `h(x) = exp(-b.x/2) cosh(lambda |x|) - 1`.
fn advection_h_derivs(b: &Vec3, lambda: f64, x: &Vec3) -> (Vec3, Mat3) {
    let r = x.norm();
    let e = (-0.5 * b.dot(x)).exp();
    let z = lambda * r;
    let ch = z.cosh();
    let s = shc(z);
    let d1 = shc_d1(z);
    let l2 = lambda * lambda;
    let grad = e * (-0.5 * ch * b + l2 * s * x);
    let hb = 0.5 * b;
    let hess = e
        * (hb * hb.transpose() * ch - l2 * s * (x * hb.transpose() + hb * x.transpose())
            + l2 * s * Mat3::identity()
            + l2 * l2 * d1 * x * x.transpose());
    (grad, hess)
}

/// `h(r theta)/r`, stable as r -> 0.
fn advection_q(b: &Vec3, lambda: f64, theta: &Vec3, r: f64) -> f64 {
    let beta = 0.5 * b.dot(theta);
    let z = lambda * r;
    let half = shc(0.5 * z);
    -beta * exprel(-r * beta) * z.cosh() + 0.5 * lambda * lambda * r * half * half
}

impl FundamentalSolution {
    pub fn kind(&self) -> &CatalogKind {
        &self.kind
    }
    pub fn id(&self) -> String {
        self.kind.id()
    }
    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }
    pub fn coeffs(&self) -> &OperatorCoefficients {
        &self.coeffs
    }
    pub fn factor(&self) -> &PrincipalFactor {
        &self.factor
    }
    /// Inverse of the principal matrix on the active block, zero elsewhere.
    pub fn a2_inv(&self) -> &Mat3 {
        &self.a2_inv
    }
    /// `1/(s_n sqrt(det a2))`.
    pub fn principal_scale(&self) -> f64 {
        self.inv_sqrt_det / unit_sphere_measure(self.dim())
    }
    pub fn b0(&self) -> C64 {
        ZERO
    }
    /// True when A1, A2, B1, C and the lower-order coefficients all vanish.
    pub fn is_principal_only(&self) -> bool {
        matches!(self.corr, Corrections::None)
    }

    pub fn principal_value(&self, x: &Vec3) -> f64 {
        let y = self.factor.t_inv * x;
        match self.dim() {
            2 => self.inv_sqrt_det * y.norm().ln() / (2.0 * PI),
            _ => -self.inv_sqrt_det / (4.0 * PI * y.norm()),
        }
    }

    pub fn principal_gradient(&self, x: &Vec3) -> Vec3 {
        let y = (self.factor.t_inv * x).norm();
        self.principal_scale() * y.powi(-(self.dim() as i32)) * (self.a2_inv * x)
    }

    pub fn a1_field(&self, theta: &Vec3, r: f64) -> C64 {
        match &self.corr {
            Corrections::Exp3d { kappa } => -exp_remainder(*kappa, r).0 / (4.0 * PI),
            Corrections::Advection3d { b, lambda, .. } => C64::new(-advection_q(b, *lambda, theta, r) / (4.0 * PI), 0.0),
            _ => ZERO,
        }
    }

    pub fn a2_field(&self, theta: &Vec3, r: f64) -> CVec3 {
        match &self.corr {
            Corrections::Exp3d { kappa } => {
                let (_, g1, _) = exp_remainder(*kappa, r);
                cvec(theta) * (-r * g1 / (4.0 * PI))
            }
            Corrections::Yukawa2d { psi, .. } => {
                let (p, _, _) = psi.eval(r * r);
                cvec(&(r * p * theta))
            }
            Corrections::Advection3d { b, lambda, .. } => {
                let (gh, _) = advection_h_derivs(b, *lambda, &(r * theta));
                let q = advection_q(b, *lambda, theta, r);
                cvec(&(-(gh - q * theta) / (4.0 * PI)))
            }
            Corrections::None => CVec3::zeros(),
        }
    }

    /// `dA2_i/dy_j` for the extension `(y, r) -> A2(y/|y|, r)` at `y = theta`.
    pub fn a2_dy(&self, theta: &Vec3, r: f64) -> CMat3 {
        let n = self.dim();
        let proj = eye(n) - theta * theta.transpose();
        match &self.corr {
            Corrections::Exp3d { kappa } => {
                let (_, g1, _) = exp_remainder(*kappa, r);
                cmat(&proj) * (-r * g1 / (4.0 * PI))
            }
            Corrections::Yukawa2d { psi, .. } => {
                let (p, _, _) = psi.eval(r * r);
                cmat(&(r * p * proj))
            }
            Corrections::Advection3d { b, lambda, .. } => {
                let x = r * theta;
                let (gh, hh) = advection_h_derivs(b, *lambda, &x);
                let q = advection_q(b, *lambda, theta, r);
                let free = -(r * hh - theta * gh.transpose() - q * Mat3::identity()) / (4.0 * PI);
                cmat(&(free * proj))
            }
            Corrections::None => CMat3::zeros(),
        }
    }

    pub fn a2_dr(&self, theta: &Vec3, r: f64) -> CVec3 {
        match &self.corr {
            Corrections::Exp3d { kappa } => {
                let (_, g1, g2) = exp_remainder(*kappa, r);
                cvec(theta) * (-(g1 + r * g2) / (4.0 * PI))
            }
            Corrections::Yukawa2d { psi, .. } => {
                let u = r * r;
                let (p, p1, _) = psi.eval(u);
                cvec(&((p + 2.0 * u * p1) * theta))
            }
            Corrections::Advection3d { b, lambda, .. } => {
                let x = r * theta;
                let (gh, hh) = advection_h_derivs(b, *lambda, &x);
                let q = advection_q(b, *lambda, theta, r);
                let beta = 0.5 * b.dot(theta);
                let dq = if r < 1e-7 {
                    0.5 * (beta * beta + lambda * lambda)
                } else {
                    (gh.dot(theta) - q) / r
                };
                cvec(&(-(hh * theta - dq * theta) / (4.0 * PI)))
            }
            Corrections::None => CVec3::zeros(),
        }
    }

    pub fn b1(&self, x: &Vec3) -> C64 {
        match &self.corr {
            Corrections::Yukawa2d { b1, .. } => C64::new(b1.eval(x.norm_squared()).0, 0.0),
            _ => ZERO,
        }
    }
    pub fn b1_grad(&self, x: &Vec3) -> CVec3 {
        match &self.corr {
            Corrections::Yukawa2d { b1, .. } => cvec(&b1.radial(x, 2).1),
            _ => CVec3::zeros(),
        }
    }
    pub fn b1_hess(&self, x: &Vec3) -> CMat3 {
        match &self.corr {
            Corrections::Yukawa2d { b1, .. } => cmat(&b1.radial(x, 2).2),
            _ => CMat3::zeros(),
        }
    }

    pub fn c(&self, x: &Vec3) -> C64 {
        match &self.corr {
            Corrections::Exp3d { kappa } => -kappa / (4.0 * PI),
            Corrections::Yukawa2d { c, .. } => C64::new(c.eval(x.norm_squared()).0, 0.0),
            Corrections::Advection3d { b, c, .. } => {
                C64::new((-0.5 * b.dot(x)).exp() * c.eval(x.norm_squared()).0, 0.0)
            }
            Corrections::None => ZERO,
        }
    }
    pub fn c_grad(&self, x: &Vec3) -> CVec3 {
        match &self.corr {
            Corrections::Yukawa2d { c, .. } => cvec(&c.radial(x, 2).1),
            Corrections::Advection3d { b, c, .. } => {
                let e = (-0.5 * b.dot(x)).exp();
                let (p, g, _) = c.radial(x, 3);
                cvec(&(e * (g - 0.5 * p * b)))
            }
            _ => CVec3::zeros(),
        }
    }
    pub fn c_hess(&self, x: &Vec3) -> CMat3 {
        match &self.corr {
            Corrections::Yukawa2d { c, .. } => cmat(&c.radial(x, 2).2),
            Corrections::Advection3d { b, c, .. } => {
                let e = (-0.5 * b.dot(x)).exp();
                let (p, g, h) = c.radial(x, 3);
                let hb = 0.5 * b;
                cmat(&(e * (hb * hb.transpose() * p - hb * g.transpose() - g * hb.transpose() + h)))
            }
            _ => CMat3::zeros(),
        }
    }

    pub fn b1_field(&self) -> B1Field<'_> {
        B1Field(self)
    }
    pub fn c_field(&self) -> CField<'_> {
        CField(self)
    }

    /// Value through the structured decomposition.
    pub fn value(&self, x: &Vec3) -> Result<C64> {
        let r = x.norm();
        if r == 0.0 {
            return Err(Error::OriginEvaluation);
        }
        let theta = x / r;
        let n = self.dim();
        let mut v = C64::new(self.principal_value(x), 0.0);
        if !self.is_principal_only() {
            let rad = if n == 3 { 1.0 } else { r };
            v += rad * self.a1_field(&theta, r) + self.b1(x) * r.ln() + self.c(x);
        }
        Ok(v)
    }

    /// Gradient through the structured decomposition.
    pub fn gradient(&self, x: &Vec3) -> Result<CVec3> {
        let r = x.norm();
        if r == 0.0 {
            return Err(Error::OriginEvaluation);
        }
        let theta = x / r;
        let mut g = cvec(&self.principal_gradient(x));
        if !self.is_principal_only() {
            let rad = if self.dim() == 3 { 1.0 / r } else { 1.0 };
            g += self.a2_field(&theta, r) * C64::from(rad) + self.b1_grad(x) * C64::from(r.ln()) + self.c_grad(x);
        }
        Ok(g)
    }

    /// Closed form of the same fundamental solution, bypassing the
    /// decomposition. Used as an independent cross-check.
    pub fn reference_value(&self, x: &Vec3) -> Result<C64> {
        let r = x.norm();
        if r == 0.0 {
            return Err(Error::OriginEvaluation);
        }
        Ok(match &self.kind {
            CatalogKind::Laplace | CatalogKind::Anisotropic(_) => C64::new(self.principal_value(x), 0.0),
            CatalogKind::Yukawa3d { lambda } => C64::new(-(-lambda * r).exp() / (4.0 * PI * r), 0.0),
            CatalogKind::Helmholtz3d { k } => -C64::new(0.0, k * r).exp() / (4.0 * PI * r),
            CatalogKind::Yukawa2d { lambda } => C64::new(-bessel::k0(lambda * r) / (2.0 * PI), 0.0),
            CatalogKind::Advection3d { b } => {
                let bv = Vec3::new(b[0], b[1], b[2]);
                let lambda = 0.5 * bv.norm();
                C64::new(-(-0.5 * bv.dot(x) - lambda * r).exp() / (4.0 * PI * r), 0.0)
            }
        })
    }

    /// Relative finite-difference residual of `P[a,D] S` at `x`.
    pub fn pde_residual(&self, x: &Vec3) -> f64 {
        let n = self.dim();
        let f = |p: &Vec3| self.value(p).unwrap_or(ZERO);
        let h0 = 1e-2 * x.norm().max(0.1);
        let e = |i: usize| {
            let mut v = Vec3::zeros();
            v[i] = 1.0;
            v
        };
        let second = |l: usize, j: usize, h: f64| -> C64 {
            if l == j {
                let d = h * e(l);
                (f(&(x + d)) - 2.0 * f(x) + f(&(x - d))) / (h * h)
            } else {
                let (dl, dj) = (h * e(l), h * e(j));
                (f(&(x + dl + dj)) - f(&(x + dl - dj)) - f(&(x - dl + dj)) + f(&(x - dl - dj))) / (4.0 * h * h)
            }
        };
        let first = |l: usize, h: f64| -> C64 {
            let d = h * e(l);
            (f(&(x + d)) - f(&(x - d))) / (2.0 * h)
        };
        let rich = |a: C64, b: C64| (4.0 * b - a) / 3.0;
        let a2 = self.coeffs.a2();
        let a1 = self.coeffs.a1();
        let s = f(x);
        let mut total = self.coeffs.a0() * s;
        let mut scale = (self.coeffs.a0() * s).norm();
        for l in 0..n {
            let d = rich(first(l, h0), first(l, 0.5 * h0));
            total += a1[l] * d;
            scale += (a1[l] * d).norm();
            for j in 0..n {
                if a2[(l, j)] == 0.0 {
                    continue;
                }
                let d2 = rich(second(l, j, h0), second(l, j, 0.5 * h0));
                total += a2[(l, j)] * d2;
                scale += (a2[(l, j)] * d2).norm();
            }
        }
        total.norm() / scale.max(1e-300)
    }

    /// Structural checks on deterministic sample directions.
    pub fn verify_structure(&self, samples: usize) -> StructureReport {
        let samples = samples.max(16);
        let n = self.dim();
        let dirs = sample_directions(n, samples);
        let origin = Vec3::zeros();
        let b1_zero = self.b1(&origin).norm() == 0.0;
        let odd_nullity = if n % 2 == 1 {
            self.b0().norm() == 0.0 && dirs.iter().all(|d| self.b1(&(0.7 * d)).norm() == 0.0)
        } else {
            true
        };
        let mut a1_odd: f64 = 0.0;
        let mut a2_even: f64 = 0.0;
        let mut grad_res: f64 = 0.0;
        let mut pde_res: f64 = 0.0;
        for (i, d) in dirs.iter().enumerate() {
            a1_odd = a1_odd.max((self.a1_field(d, 0.0) + self.a1_field(&(-d), 0.0)).norm());
            a2_even = a2_even.max((self.a2_field(d, 0.0) - self.a2_field(&(-d), 0.0)).norm());
            let t = (i as f64 + 0.5) / samples as f64;
            let x = d * (0.5 * 4f64.powf(t));
            let g = self.gradient(&x).unwrap();
            let h = 1e-5 * x.norm();
            let mut worst: f64 = 0.0;
            for l in 0..n {
                let mut dl = Vec3::zeros();
                dl[l] = h;
                let fd = (self.value(&(x + dl)).unwrap() - self.value(&(x - dl)).unwrap()) / (2.0 * h);
                worst = worst.max((fd - g[l]).norm());
            }
            grad_res = grad_res.max(worst / g.norm().max(1e-300));
            pde_res = pde_res.max(self.pde_residual(&x));
        }
        let passed = b1_zero
            && odd_nullity
            && a1_odd <= STRUCTURE_SYMMETRY_TOL
            && a2_even <= STRUCTURE_SYMMETRY_TOL
            && grad_res <= STRUCTURE_GRADIENT_TOL
            && pde_res <= STRUCTURE_PDE_TOL;
        StructureReport {
            operator: self.id(),
            samples,
            b1_zero_at_origin: b1_zero,
            odd_dimension_nullity: odd_nullity,
            a1_odd_residual: a1_odd,
            a2_even_residual: a2_even,
            gradient_fd_residual: grad_res,
            pde_residual: pde_res,
            passed,
        }
    }
}

pub const STRUCTURE_SYMMETRY_TOL: f64 = 1e-10;
pub const STRUCTURE_GRADIENT_TOL: f64 = 1e-6;
pub const STRUCTURE_PDE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StructureReport {
    pub operator: String,
    pub samples: usize,
    pub b1_zero_at_origin: bool,
    pub odd_dimension_nullity: bool,
    pub a1_odd_residual: f64,
    pub a2_even_residual: f64,
    pub gradient_fd_residual: f64,
    pub pde_residual: f64,
    pub passed: bool,
}

/// Deterministic, roughly uniform unit vectors: equispaced angles in 2D and
/// a Fibonacci lattice in 3D.
pub fn sample_directions(n: usize, count: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            if n == 2 {
                let t = 2.0 * PI * (i as f64 + 0.37) / count as f64;
                Vec3::new(t.cos(), t.sin(), 0.0)
            } else {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let s = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                Vec3::new(s * phi.cos(), s * phi.sin(), z)
            }
        })
        .collect()
}

/// Every catalog entry with default parameters, paired with its dimension.
pub fn default_catalog() -> Vec<(CatalogKind, usize)> {
    vec![
        (CatalogKind::Laplace, 2),
        (CatalogKind::Laplace, 3),
        (CatalogKind::Anisotropic(Mat3::new(4.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0)), 2),
        (CatalogKind::Anisotropic(Mat3::new(2.0, 0.3, -0.2, 0.3, 1.0, 0.1, -0.2, 0.1, 1.5)), 3),
        (CatalogKind::Yukawa3d { lambda: 1.0 }, 3),
        (CatalogKind::Helmholtz3d { k: 1.0 }, 3),
        (CatalogKind::Yukawa2d { lambda: 1.0 }, 2),
        (CatalogKind::Advection3d { b: [1.0, 0.5, -0.25] }, 3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(a: f64, b: f64, c: f64) -> Vec3 {
        Vec3::new(a, b, c)
    }

    #[test]
    fn laplace_sn_examples() {
        assert_eq!(laplace_sn(&v(1.0, 0.0, 0.0), 2).unwrap(), 0.0);
        assert_relative_eq!(laplace_sn(&v(0.0, 1.0, 0.0), 3).unwrap(), -1.0 / (4.0 * PI), epsilon = 1e-16);
        assert_relative_eq!(laplace_sn(&v(0.0, 0.0, 2.0), 3).unwrap(), -1.0 / (8.0 * PI), epsilon = 1e-16);
        assert_eq!(laplace_sn(&Vec3::zeros(), 3), Err(Error::OriginEvaluation));
    }

    #[test]
    fn value_examples() {
        let s = catalog_construct(&CatalogKind::Laplace, 3).unwrap();
        assert_relative_eq!(s.value(&v(1.0, 0.0, 0.0)).unwrap().re, -1.0 / (4.0 * PI), epsilon = 1e-16);
        let a = CatalogKind::Anisotropic(Mat3::from_diagonal(&v(4.0, 1.0, 1.0)));
        let s = catalog_construct(&a, 2).unwrap();
        assert!(s.value(&v(2.0, 0.0, 0.0)).unwrap().norm() < 1e-16);
        let s = catalog_construct(&CatalogKind::Yukawa3d { lambda: 1.0 }, 3).unwrap();
        let val = s.value(&v(0.0, 1.0, 0.0)).unwrap();
        assert_relative_eq!(val.re, -(-1f64).exp() / (4.0 * PI), epsilon = 1e-15);
        assert_eq!(s.value(&Vec3::zeros()), Err(Error::OriginEvaluation));
    }

    #[test]
    fn gradient_examples() {
        let s = catalog_construct(&CatalogKind::Laplace, 3).unwrap();
        let g = s.gradient(&v(1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(g[0].re, 1.0 / (4.0 * PI), epsilon = 1e-16);
        assert_eq!(g[1], ZERO);
        let s = catalog_construct(&CatalogKind::Laplace, 2).unwrap();
        let g = s.gradient(&v(0.0, 2.0, 0.0)).unwrap();
        assert_relative_eq!(g[1].re, 1.0 / (4.0 * PI), epsilon = 1e-16);
        assert_eq!(g[0].re, 0.0);
    }

    #[test]
    fn yukawa2d_matches_k0_series() {
        let s = catalog_construct(&CatalogKind::Yukawa2d { lambda: 1.0 }, 2).unwrap();
        let x = v(0.3 * 0.6, 0.3 * 0.8, 0.0);
        let val = s.value(&x).unwrap();
        let oracle = -bessel::k0_series(0.3) / (2.0 * PI);
        assert!((val.re - oracle).abs() < 1e-14);
        assert_eq!(s.b0(), ZERO);
    }

    #[test]
    fn decomposition_matches_closed_forms() {
        for (kind, n) in default_catalog() {
            let s = catalog_construct(&kind, n).unwrap();
            for d in sample_directions(n, 24) {
                for r in [1e-4, 0.01, 0.3, 1.0, 2.5, 6.0] {
                    let x = d * r;
                    let a = s.value(&x).unwrap();
                    let b = s.reference_value(&x).unwrap();
                    assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "{} r={r}: {a} vs {b}", kind.id());
                }
            }
        }
    }

    #[test]
    fn catalog_passes_structure_checks() {
        for (kind, n) in default_catalog() {
            let s = catalog_construct(&kind, n).unwrap();
            let rep = s.verify_structure(32);
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn helmholtz_gradient_residual() {
        let s = catalog_construct(&CatalogKind::Helmholtz3d { k: 1.0 }, 3).unwrap();
        assert!(s.verify_structure(16).gradient_fd_residual <= 1e-6);
        let s = catalog_construct(&CatalogKind::Yukawa3d { lambda: 1.0 }, 3).unwrap();
        assert!(s.verify_structure(16).a1_odd_residual <= 1e-10);
    }

    #[test]
    fn smooth_field_derivatives_match_finite_differences() {
        for (kind, n) in default_catalog() {
            let s = catalog_construct(&kind, n).unwrap();
            let fields: [&dyn PointField; 2] = [&s.b1_field(), &s.c_field()];
            for f in fields {
                for d in sample_directions(n, 12) {
                    let x = 0.8 * d;
                    let h = 1e-5;
                    let g = f.grad(&x);
                    let hs = f.hess(&x);
                    for l in 0..n {
                        let mut dl = Vec3::zeros();
                        dl[l] = h;
                        let fd = (f.eval(&(x + dl)) - f.eval(&(x - dl))) / (2.0 * h);
                        assert!((fd - g[l]).norm() <= 1e-6 * g.norm().max(1e-3), "{}", kind.id());
                        let fdg = (f.grad(&(x + dl)) - f.grad(&(x - dl))) / C64::from(2.0 * h);
                        for j in 0..n {
                            assert!((fdg[j] - hs[(j, l)]).norm() <= 1e-5 * hs.norm().max(1e-3), "{}", kind.id());
                        }
                    }
                }
            }
        }
    }

    /// A2 derivatives against finite differences of A2 itself, using the
    /// radial-constant extension for the angular variable.
    #[test]
    fn a2_derivatives_match_finite_differences() {
        for (kind, n) in default_catalog() {
            let s = catalog_construct(&kind, n).unwrap();
            for d in sample_directions(n, 10) {
                for r in [0.05, 0.7, 1.9] {
                    let h = 1e-6;
                    let dr = (s.a2_field(&d, r + h) - s.a2_field(&d, r - h)) / C64::from(2.0 * h);
                    let an = s.a2_dr(&d, r);
                    assert!((dr - an).norm() <= 1e-6 * an.norm().max(1e-3), "{} dr", kind.id());
                    let dy = s.a2_dy(&d, r);
                    for j in 0..n {
                        let mut e = Vec3::zeros();
                        e[j] = h;
                        let p = (d + e).normalize();
                        let m = (d - e).normalize();
                        let fd = (s.a2_field(&p, r) - s.a2_field(&m, r)) / C64::from(2.0 * h);
                        for i in 0..n {
                            assert!((fd[i] - dy[(i, j)]).norm() <= 1e-6 * dy.norm().max(1e-3), "{} dy", kind.id());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_reject() {
        assert_eq!(CatalogKind::parse("yukawa3d:lambda=1.0").unwrap(), CatalogKind::Yukawa3d { lambda: 1.0 });
        assert!(matches!(CatalogKind::parse("maxwell"), Err(Error::UnsupportedKind(_))));
        assert!(CatalogKind::parse("yukawa3d:lambda=-1").is_err());
        assert!(matches!(
            catalog_construct(&CatalogKind::Yukawa2d { lambda: 1.0 }, 3),
            Err(Error::UnsupportedKind(_))
        ));
        for (kind, _) in default_catalog() {
            assert_eq!(CatalogKind::parse(&kind.id()).unwrap(), kind);
        }
    }

    proptest! {
        #[test]
        fn principal_part_is_homogeneous(x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0, t in 0.1f64..10.0) {
            let p = v(x, y, z);
            prop_assume!(p.norm() > 1e-3);
            let kind = CatalogKind::Anisotropic(Mat3::new(2.0, 0.3, -0.2, 0.3, 1.0, 0.1, -0.2, 0.1, 1.5));
            let s = catalog_construct(&kind, 3).unwrap();
            let a = s.value(&(t * p)).unwrap().re;
            let b = s.value(&p).unwrap().re / t;
            prop_assert!((a - b).abs() <= 1e-12 * b.abs());
        }

        #[test]
        fn pde_residual_small_on_annulus(idx in 0usize..8, t in 0.0f64..1.0, dir in 0usize..64) {
            let (kind, n) = default_catalog()[idx].clone();
            let s = catalog_construct(&kind, n).unwrap();
            let x = sample_directions(n, 64)[dir] * (0.5 + 1.5 * t);
            prop_assert!(s.pde_residual(&x) <= 1e-5);
        }
    }
}
