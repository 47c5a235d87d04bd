//! Parametrised closed boundaries and quadrature on them.
//!
//! Curves are parametrised by an angle `t` in `[0, 2pi)`. Surfaces are images
//! `P(w) = diag(a, b, c) w` of the unit sphere, parametrised by the unit
//! vector `w` itself, so every surface point has a chart-free parameter.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ids::parse_id;
use crate::quadrature::{composite_rule, gauss_legendre_on, graded_breakpoints_capped};

use crate::{CVec3, Mat3, Vec3, C64};

/// Longest panel used by the composite curve and radial rules.
const MAX_PANEL: f64 = PI / 8.0;

/// Boundary parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Angle(f64),
    Dir(Vec3),
}

impl Param {
    pub fn angle(&self) -> f64 {
        match self {
            Param::Angle(t) => *t,
            Param::Dir(_) => panic!("surface parameter has no angle"),
        }
    }
    pub fn dir(&self) -> Vec3 {
        match self {
            Param::Dir(w) => *w,
            Param::Angle(_) => panic!("curve parameter has no direction"),
        }
    }
    /// Scalar used in CSV output: the angle, or the polar angle of `w`.
    pub fn scalar(&self) -> f64 {
        match self {
            Param::Angle(t) => *t,
            Param::Dir(w) => w[2].clamp(-1.0, 1.0).acos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub param: Param,
    pub x: Vec3,
    pub normal: Vec3,
    /// Surface element per unit parameter measure (dt, or solid angle).
    pub jacobian: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeKind {
    /// Circle of radius `r`, optionally reparametrised by `t -> t + warp sin t`.
    Circle { r: f64, warp: f64 },
    Ellipse { a: f64, b: f64 },
    /// `r(t) = 1 + c cos(k t)`.
    Star { c: f64, k: u32 },
    Sphere { r: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<BoundaryPoint>,
    pub weights: Vec<f64>,
    pub level: u32,
}

impl QuadratureRule {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn integrate<F: Fn(&BoundaryPoint) -> C64>(&self, f: F) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(p, w)| f(p) * *w).sum()
    }
}

/// Boundary-valued function, either given in ambient coordinates together
/// with its gradient or only through the parametrisation.
pub enum SurfaceFunction<'a> {
    Ambient(&'a (dyn Fn(&Vec3) -> (C64, CVec3) + Sync)),
    Parametric(&'a (dyn Fn(&Param) -> C64 + Sync)),
}

#[derive(Debug, Clone)]
pub struct BoundaryManifold {
    kind: ShapeKind,
    dim: usize,
    diameter: f64,
    id: String,
}

fn bad(name: &str, reason: impl Into<String>) -> Error {
    Error::BadShapeParameters { name: name.to_string(), reason: reason.into() }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(name, format!("must be positive, got {v}")))
    }
}

/// Orthonormal tangent frame at a unit vector, chosen deterministically.
pub fn sphere_frame(w: &Vec3) -> (Vec3, Vec3) {
    let mut k = 0;
    for i in 1..3 {
        if w[i].abs() < w[k].abs() {
            k = i;
        }
    }
    let mut a = Vec3::zeros();
    a[k] = 1.0;
    let e1 = (a - w * w.dot(&a)).normalize();
    let e2 = w.cross(&e1);
    (e1, e2)
}

/// Unit vector at geodesic distance `rho` from `w` in direction `psi`.
pub fn sphere_offset(w: &Vec3, e1: &Vec3, e2: &Vec3, rho: f64, psi: f64) -> Vec3 {
    let u = psi.cos() * e1 + psi.sin() * e2;
    (rho.cos() * w + rho.sin() * u).normalize()
}

impl BoundaryManifold {
    pub fn new(kind: ShapeKind) -> Result<Self> {
        let dim = match kind {
            ShapeKind::Circle { r, warp } => {
                positive("R", r)?;
                if !(warp.abs() < 1.0) {
                    return Err(bad("warp", "must satisfy |warp| < 1"));
                }
                2
            }
            ShapeKind::Ellipse { a, b } => {
                positive("a", a)?;
                positive("b", b)?;
                2
            }
            ShapeKind::Star { c, k } => {
                if !(0.0..1.0).contains(&c) {
                    return Err(bad("c", format!("must lie in [0, 1), got {c}")));
                }
                if k == 0 {
                    return Err(bad("k", "must be a positive integer"));
                }
                2
            }
            ShapeKind::Sphere { r } => {
                positive("R", r)?;
                3
            }
            ShapeKind::Ellipsoid { a, b, c } => {
                positive("a", a)?;
                positive("b", b)?;
                positive("c", c)?;
                3
            }
        };
        let id = match kind {
            ShapeKind::Circle { r, warp } if warp == 0.0 => format!("circle:R={r}"),
            ShapeKind::Circle { r, warp } => format!("circle:R={r},warp={warp}"),
            ShapeKind::Ellipse { a, b } => format!("ellipse:a={a},b={b}"),
            ShapeKind::Star { c, k } => format!("star:c={c},k={k}"),
            ShapeKind::Sphere { r } => format!("sphere:R={r}"),
            ShapeKind::Ellipsoid { a, b, c } => format!("ellipsoid:a={a},b={b},c={c}"),
        };
        let mut m = BoundaryManifold { kind, dim, diameter: 0.0, id };
        m.diameter = m.sampled_diameter();
        Ok(m)
    }

    pub fn parse(id: &str) -> Result<Self> {
        let p = parse_id(id)?;
        let get = |k: &str| p.get(k).ok_or_else(|| bad(k, format!("missing in `{id}`")));
        let kind = match p.name.as_str() {
            "circle" => {
                p.reject_unknown(&["R", "warp"])?;
                ShapeKind::Circle { r: get("R")?, warp: p.get("warp").unwrap_or(0.0) }
            }
            "ellipse" => {
                p.reject_unknown(&["a", "b"])?;
                ShapeKind::Ellipse { a: get("a")?, b: get("b")? }
            }
            "star" => {
                p.reject_unknown(&["c", "k"])?;
                let k = get("k")?;
                if k.fract() != 0.0 || k < 1.0 {
                    return Err(bad("k", format!("must be a positive integer, got {k}")));
                }
                ShapeKind::Star { c: get("c")?, k: k as u32 }
            }
            "sphere" => {
                p.reject_unknown(&["R"])?;
                ShapeKind::Sphere { r: get("R")? }
            }
            "ellipsoid" => {
                p.reject_unknown(&["a", "b", "c"])?;
                ShapeKind::Ellipsoid { a: get("a")?, b: get("b")?, c: get("c")? }
            }
            other => return Err(bad("shape", format!("unknown shape `{other}`"))),
        };
        Self::new(kind)
    }

    pub fn id(&self) -> &str {
        &self.id
    }
    pub fn kind(&self) -> ShapeKind {
        self.kind
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn diameter(&self) -> f64 {
        self.diameter
    }
    pub fn inside_point(&self) -> Vec3 {
        Vec3::zeros()
    }

    fn axes(&self) -> Vec3 {
        match self.kind {
            ShapeKind::Sphere { r } => Vec3::new(r, r, r),
            ShapeKind::Ellipsoid { a, b, c } => Vec3::new(a, b, c),
            _ => Vec3::new(1.0, 1.0, 1.0),
        }
    }

    fn sampled_diameter(&self) -> f64 {
        let rule = self.surface_quadrature(2);
        let pts: Vec<Vec3> = rule.nodes.iter().map(|p| p.x).collect();
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = best.max((pts[i] - pts[j]).norm_squared());
            }
        }
        best.sqrt()
    }

    /// Curve position, first and second derivative in `t`.
    fn curve(&self, t: f64) -> (Vec3, Vec3) {
        match self.kind {
            ShapeKind::Circle { r, warp } => {
                let phi = t + warp * t.sin();
                let dphi = 1.0 + warp * t.cos();
                (Vec3::new(r * phi.cos(), r * phi.sin(), 0.0), Vec3::new(-r * phi.sin() * dphi, r * phi.cos() * dphi, 0.0))
            }
            ShapeKind::Ellipse { a, b } => (Vec3::new(a * t.cos(), b * t.sin(), 0.0), Vec3::new(-a * t.sin(), b * t.cos(), 0.0)),
            ShapeKind::Star { c, k } => {
                let kf = k as f64;
                let rr = 1.0 + c * (kf * t).cos();
                let dr = -c * kf * (kf * t).sin();
                let (ct, st) = (t.cos(), t.sin());
                (Vec3::new(rr * ct, rr * st, 0.0), Vec3::new(dr * ct - rr * st, dr * st + rr * ct, 0.0))
            }
            _ => unreachable!("curve called on a surface"),
        }
    }

    pub fn point(&self, p: &Param) -> BoundaryPoint {
        match *p {
            Param::Angle(t) => {
                let (x, d) = self.curve(t);
                let j = d.norm();
                BoundaryPoint { param: *p, x, normal: Vec3::new(d[1] / j, -d[0] / j, 0.0), jacobian: j }
            }
            Param::Dir(w) => {
                let ax = self.axes();
                let x = ax.component_mul(&w);
                let m = w.component_div(&ax);
                let mn = m.norm();
                BoundaryPoint { param: *p, x, normal: m / mn, jacobian: ax[0] * ax[1] * ax[2] * mn }
            }
        }
    }

    /// Tangent vectors `dx/du_i` for the local parameters used by
    /// [`Self::offset`].
    pub fn tangents(&self, p: &Param) -> Vec<Vec3> {
        match *p {
            Param::Angle(t) => vec![self.curve(t).1],
            Param::Dir(w) => {
                let ax = self.axes();
                let (e1, e2) = sphere_frame(&w);
                vec![ax.component_mul(&e1), ax.component_mul(&e2)]
            }
        }
    }

    /// Moves a parameter by local coordinates `step` (length n-1).
    pub fn offset(&self, p: &Param, step: &[f64]) -> Param {
        match *p {
            Param::Angle(t) => Param::Angle(t + step[0]),
            Param::Dir(w) => {
                let (e1, e2) = sphere_frame(&w);
                let rho = (step[0] * step[0] + step[1] * step[1]).sqrt();
                if rho == 0.0 {
                    return *p;
                }
                Param::Dir(sphere_offset(&w, &e1, &e2, rho, step[1].atan2(step[0])))
            }
        }
    }

    /// `x(p) - x(q)` with cancellation-free formulas where available.
    pub fn chord(&self, p: &Param, q: &Param) -> Vec3 {
        match (*p, *q) {
            (Param::Angle(s), Param::Angle(t)) => {
                let hs = 0.5 * (s - t);
                let hm = 0.5 * (s + t);
                let sh = hs.sin();
                let unit = Vec3::new(-2.0 * hm.sin() * sh, 2.0 * hm.cos() * sh, 0.0);
                match self.kind {
                    ShapeKind::Circle { r, warp } => {
                        let ps = s + warp * s.sin();
                        let pt = t + warp * t.sin();
                        // phi(s)-phi(t) = (s-t) + 2 warp cos((s+t)/2) sin((s-t)/2)
                        let dphi = (s - t) + 2.0 * warp * hm.cos() * sh;
                        let pm = 0.5 * (ps + pt);
                        let shp = (0.5 * dphi).sin();
                        r * Vec3::new(-2.0 * pm.sin() * shp, 2.0 * pm.cos() * shp, 0.0)
                    }
                    ShapeKind::Ellipse { a, b } => Vec3::new(a * unit[0], b * unit[1], 0.0),
                    ShapeKind::Star { c, k } => {
                        let kf = k as f64;
                        let rs = 1.0 + c * (kf * s).cos();
                        let dr = -2.0 * c * (kf * hm).sin() * (kf * hs).sin();
                        rs * unit + dr * Vec3::new(t.cos(), t.sin(), 0.0)
                    }
                    _ => unreachable!(),
                }
            }
            (Param::Dir(a), Param::Dir(b)) => self.axes().component_mul(&(a - b)),
            _ => panic!("mixed parameter kinds"),
        }
    }

    /// `(x(p) - x(q)) . normal(q)`, computed without cancellation for
    /// ellipses and ellipsoids.
    pub fn chord_dot_normal(&self, p: &Param, q: &Param) -> f64 {
        match (self.kind, *p, *q) {
            (ShapeKind::Ellipse { a, b }, Param::Angle(s), Param::Angle(t)) => {
                let h = (0.5 * (s - t)).sin();
                let m = Vec3::new(b * t.cos(), a * t.sin(), 0.0).norm();
                -2.0 * a * b * h * h / m
            }
            (ShapeKind::Circle { r, .. }, Param::Angle(_), Param::Angle(_)) => {
                let d = self.chord(p, q);
                -d.norm_squared() / (2.0 * r)
            }
            (_, Param::Dir(a), Param::Dir(b)) => {
                let ax = self.axes();
                let m = b.component_div(&ax).norm();
                // (a - b) . b without assuming |a| = |b| = 1 exactly
                let d = a - b;
                (0.5 * d.dot(&(a + b)) - 0.5 * d.norm_squared()) / m
            }
            _ => self.chord(p, q).dot(&self.point(q).normal),
        }
    }

    /// Global rule: trapezoid with `32 * 2^level` nodes for curves;
    /// Gauss-Legendre in `cos(phi)` times trapezoid in the azimuth for
    /// surfaces, with `8 * 2^level` latitude nodes.
    pub fn surface_quadrature(&self, level: u32) -> QuadratureRule {
        if self.dim == 2 {
            let n = 32usize << level;
            let h = 2.0 * PI / n as f64;
            let nodes: Vec<BoundaryPoint> = (0..n).map(|k| self.point(&Param::Angle(h * k as f64))).collect();
            let weights = nodes.iter().map(|p| h * p.jacobian).collect();
            QuadratureRule { nodes, weights, level }
        } else {
            let m = 8usize << level;
            let na = 2 * m;
            let (z, wz) = gauss_legendre_on(m, -1.0, 1.0);
            let h = 2.0 * PI / na as f64;
            let mut nodes = Vec::with_capacity(m * na);
            let mut weights = Vec::with_capacity(m * na);
            for (zi, wi) in z.iter().zip(&wz) {
                let s = (1.0 - zi * zi).sqrt();
                for k in 0..na {
                    let psi = h * (k as f64 + 0.5);
                    let p = self.point(&Param::Dir(Vec3::new(s * psi.cos(), s * psi.sin(), *zi)));
                    weights.push(wi * h * p.jacobian);
                    nodes.push(p);
                }
            }
            QuadratureRule { nodes, weights, level }
        }
    }

    /// Rule on the whole boundary adapted to a singularity at `center`.
    ///
    /// Curves: composite Gauss-Legendre on `(t, t + 2pi)` graded towards both
    /// ends. Surfaces: polar coordinates centred at `center`, Gauss-Legendre
    /// in the geodesic radius and trapezoid in the angle.
    pub fn singular_rule(&self, center: &Param, level: u32) -> QuadratureRule {
        self.singular_rule_with_breaks(center, level, &[])
    }

    /// As [`Self::singular_rule`], with extra panel breakpoints (curve
    /// parameters) where the integrand is known to be non-smooth.
    pub fn singular_rule_with_breaks(&self, center: &Param, level: u32, breaks: &[f64]) -> QuadratureRule {
        match *center {
            Param::Angle(t0) => {
                let order = 12 + 2 * level as usize;
                let mut bp = graded_breakpoints_capped(t0, t0 + 2.0 * PI, 1e-14, true, true, MAX_PANEL);
                for &b in breaks {
                    let mut u = (b - t0).rem_euclid(2.0 * PI);
                    if u > 1e-12 && u < 2.0 * PI - 1e-12 {
                        u += t0;
                        bp.extend(graded_breakpoints_capped(u - 0.25, u, 1e-14, false, true, MAX_PANEL));
                        bp.extend(graded_breakpoints_capped(u, u + 0.25, 1e-14, true, false, MAX_PANEL));
                    }
                }
                bp.retain(|v| *v >= t0 && *v <= t0 + 2.0 * PI);
                bp.sort_by(|a, b| a.partial_cmp(b).unwrap());
                bp.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
                let (t, w) = composite_rule(&bp, order);
                self.curve_rule(&t, &w, level)
            }
            Param::Dir(w0) => {
                let nr = 16 + 8 * level as usize;
                let (rho, wr) = gauss_legendre_on(nr, 0.0, PI);
                self.polar_rule(&w0, level, 2 * nr, |_| (rho.clone(), wr.clone()))
            }
        }
    }

    fn curve_rule(&self, t: &[f64], w: &[f64], level: u32) -> QuadratureRule {
        let nodes: Vec<BoundaryPoint> = t.iter().map(|ti| self.point(&Param::Angle(*ti))).collect();
        let weights = nodes.iter().zip(w).map(|(p, wi)| wi * p.jacobian).collect();
        QuadratureRule { nodes, weights, level }
    }

    /// Polar rule around `w0`; `radial(psi)` supplies radial nodes/weights.
    fn polar_rule<F>(&self, w0: &Vec3, level: u32, n_angle: usize, radial: F) -> QuadratureRule
    where
        F: Fn(f64) -> (Vec<f64>, Vec<f64>),
    {
        let (e1, e2) = sphere_frame(w0);
        let h = 2.0 * PI / n_angle as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for k in 0..n_angle {
            let psi = h * (k as f64 + 0.5);
            let (rho, wr) = radial(psi);
            for (r, wi) in rho.iter().zip(&wr) {
                let p = self.point(&Param::Dir(sphere_offset(w0, &e1, &e2, *r, psi)));
                weights.push(wi * h * r.sin() * p.jacobian);
                nodes.push(p);
            }
        }
        QuadratureRule { nodes, weights, level }
    }

    /// Distance from `x(center)` along the ray of local parameters.
    fn ray_distance(&self, center: &Param, frame: Option<&(Vec3, Vec3)>, psi: f64, s: f64) -> f64 {
        match *center {
            Param::Angle(t0) => self.chord(&Param::Angle(t0 + s), center).norm(),
            Param::Dir(w0) => {
                let (e1, e2) = frame.unwrap();
                self.chord(&Param::Dir(sphere_offset(&w0, e1, e2, s, psi)), center).norm()
            }
        }
    }

    /// Smallest parameter distance along the ray at which the distance to
    /// the centre reaches `r`, or `None` if it never does within `smax`.
    /// `sign` selects the direction of travel for curves.
    fn crossing(&self, center: &Param, frame: Option<&(Vec3, Vec3)>, psi: f64, r: f64, smax: f64, sign: f64) -> Option<f64> {
        let dist = |s: f64| self.ray_distance(center, frame, psi, sign * s);
        // Geometric bracket from below, then a uniform scan of the bracket
        // so a thin excursion is not skipped, then bisection.
        let mut lo = 0.0;
        let mut hi = None;
        let mut s = smax * 2f64.powi(-52);
        while s <= smax {
            if dist(s) >= r {
                hi = Some(s);
                break;
            }
            lo = s;
            s *= 2.0;
        }
        if hi.is_none() && dist(smax) >= r {
            hi = Some(smax);
        }
        let mut hi = hi?;
        let sub = 16;
        let step = (hi - lo) / sub as f64;
        for i in 1..sub {
            let si = lo + step * i as f64;
            if dist(si) >= r {
                hi = si;
                break;
            }
            lo = si;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if dist(mid) >= r {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// Rule on `boundary \ B(x(center), r)`.
    ///
    /// The excised region is located by root finding along parameter rays,
    /// so the ball boundary is resolved exactly; any nodes beyond the first
    /// crossing that fall back inside the ball are dropped.
    pub fn excised_rule(&self, center: &Param, r: f64, level: u32) -> QuadratureRule {
        let x0 = self.point(center).x;
        let order = 10 + 2 * level as usize;
        let rule = match *center {
            Param::Angle(t0) => {
                let fwd = self.crossing(center, None, 0.0, r, PI, 1.0);
                let bwd = self.crossing(center, None, 0.0, r, PI, -1.0);
                let (Some(a), Some(b)) = (fwd, bwd) else {
                    return QuadratureRule { nodes: vec![], weights: vec![], level };
                };
                let lo = t0 + a;
                let hi = t0 + 2.0 * PI - b;
                if hi <= lo {
                    return QuadratureRule { nodes: vec![], weights: vec![], level };
                }
                let first = a.min(b).max(1e-15);
                let bp = graded_breakpoints_capped(lo, hi, first, true, true, MAX_PANEL);
                let (t, w) = composite_rule(&bp, order);
                self.curve_rule(&t, &w, level)
            }
            Param::Dir(w0) => {
                let frame = sphere_frame(&w0);
                let n_angle = 24 + 8 * level as usize;
                self.polar_rule(&w0, level, n_angle, |psi| match self.crossing(center, Some(&frame), psi, r, PI, 1.0) {
                    Some(rho0) => {
                        let bp = graded_breakpoints_capped(rho0, PI, rho0, true, false, MAX_PANEL);
                        composite_rule(&bp, order)
                    }
                    None => (vec![], vec![]),
                })
            }
        };
        let mut nodes = Vec::with_capacity(rule.nodes.len());
        let mut weights = Vec::with_capacity(rule.nodes.len());
        for (p, w) in rule.nodes.into_iter().zip(rule.weights) {
            if (p.x - x0).norm() >= r {
                nodes.push(p);
                weights.push(w);
            }
        }
        QuadratureRule { nodes, weights, level }
    }

    /// Rule on the connected piece of `boundary & B(x(center), s)` that
    /// contains the centre (curves only), graded towards the centre.
    pub fn ball_rule(&self, center: &Param, s: f64, level: u32) -> QuadratureRule {
        let t0 = center.angle();
        let order = 10 + 2 * level as usize;
        let a = self.crossing(center, None, 0.0, s, PI, 1.0).unwrap_or(PI);
        let b = self.crossing(center, None, 0.0, s, PI, -1.0).unwrap_or(PI);
        let mut t = Vec::new();
        let mut w = Vec::new();
        for (lo, hi, left) in [(t0 - b, t0, false), (t0, t0 + a, true)] {
            let bp = graded_breakpoints_capped(lo, hi, 1e-14, left, !left, MAX_PANEL);
            let (ti, wi) = composite_rule(&bp, order);
            t.extend(ti);
            w.extend(wi);
        }
        self.curve_rule(&t, &w, level)
    }

    /// Ambient gradient of `f` at `p`, with zero normal component for
    /// parametric input.
    pub fn ambient_gradient(&self, f: &SurfaceFunction, p: &Param) -> CVec3 {
        match f {
            SurfaceFunction::Ambient(g) => {
                let mut v = g(&self.point(p).x).1;
                for k in self.dim..3 {
                    v[k] = C64::new(0.0, 0.0);
                }
                v
            }
            SurfaceFunction::Parametric(g) => {
                let h = 1e-5;
                let bp = self.point(p);
                let tang = self.tangents(p);
                let n1 = self.dim - 1;
                let mut rows = Mat3::identity();
                let mut rhs = CVec3::zeros();
                for i in 0..n1 {
                    let mut sp = vec![0.0; n1];
                    let mut sm = vec![0.0; n1];
                    sp[i] = h;
                    sm[i] = -h;
                    let fp = g(&self.offset(p, &sp));
                    let fm = g(&self.offset(p, &sm));
                    rhs[i] = (fp - fm) / (2.0 * h);
                    for c in 0..3 {
                        rows[(i, c)] = tang[i][c];
                    }
                }
                for c in 0..3 {
                    rows[(n1, c)] = bp.normal[c];
                }
                // For curves the third row stays e_3, pinning the third
                // component to zero.
                let inv = rows.try_inverse().expect("tangent system is singular");
                inv.map(|v| C64::new(v, 0.0)) * rhs
            }
        }
    }

    /// `M_lr[f] = nu_l d_r f - nu_r d_l f` at `p` (zero-based indices).
    pub fn tangential_derivative_mlr(&self, f: &SurfaceFunction, l: usize, r: usize, p: &Param) -> Result<C64> {
        for idx in [l, r] {
            if idx >= self.dim {
                return Err(Error::IndexOutOfRange { index: idx, dim: self.dim });
            }
        }
        let g = self.ambient_gradient(f, p);
        let nu = self.point(p).normal;
        Ok(g[r] * nu[l] - g[l] * nu[r])
    }

    /// `grad f - nu (nu . grad f)`.
    pub fn tangential_gradient(&self, f: &SurfaceFunction, p: &Param) -> CVec3 {
        let g = self.ambient_gradient(f, p);
        let nu = self.point(p).normal;
        let dot = crate::cdot(&g, &nu);
        g - crate::cvec(&nu) * dot
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn shapes() -> Vec<BoundaryManifold> {
        ["circle:R=1", "ellipse:a=2,b=1", "star:c=0.2,k=5", "sphere:R=1", "ellipsoid:a=1,b=1,c=2", "circle:R=1,warp=0.4"]
            .iter()
            .map(|s| BoundaryManifold::parse(s).unwrap())
            .collect()
    }

    #[test]
    fn circle_point_and_normal() {
        let m = BoundaryManifold::parse("circle:R=1").unwrap();
        for t in [0.0, 0.7, 2.0, 4.5] {
            let p = m.point(&Param::Angle(t));
            assert_relative_eq!(p.x, Vec3::new(t.cos(), t.sin(), 0.0), epsilon = 1e-15);
            assert_relative_eq!(p.normal, Vec3::new(t.cos(), t.sin(), 0.0), epsilon = 1e-15);
        }
    }

    #[test]
    fn areas_and_perimeters() {
        let m = BoundaryManifold::parse("circle:R=1").unwrap();
        assert!((m.surface_quadrature(0).total_weight() - 2.0 * PI).abs() < 1e-12);
        let m = BoundaryManifold::parse("sphere:R=1").unwrap();
        assert!((m.surface_quadrature(2).total_weight() - 4.0 * PI).abs() < 1e-8);
        let m = BoundaryManifold::parse("sphere:R=2").unwrap();
        assert!((m.surface_quadrature(2).total_weight() - 16.0 * PI).abs() < 1e-8);
        let m = BoundaryManifold::parse("ellipse:a=2,b=1").unwrap();
        assert!((m.surface_quadrature(3).total_weight() - ellipse_perimeter_oracle(2.0, 1.0)).abs() < 1e-10);
        assert!((ellipse_perimeter_oracle(2.0, 1.0) - 9.688_448_220_5).abs() < 1e-10);
    }

    /// Arclength by adaptive Simpson on the quarter arc.
    fn ellipse_perimeter_oracle(a: f64, b: f64) -> f64 {
        fn f(a: f64, b: f64, t: f64) -> f64 {
            (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt()
        }
        fn simpson(a: f64, b: f64, lo: f64, hi: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let mid = 0.5 * (lo + hi);
            let l = (mid - lo) / 6.0 * (f(a, b, lo) + 4.0 * f(a, b, 0.5 * (lo + mid)) + f(a, b, mid));
            let r = (hi - mid) / 6.0 * (f(a, b, mid) + 4.0 * f(a, b, 0.5 * (mid + hi)) + f(a, b, hi));
            if depth == 0 || (l + r - whole).abs() < 15.0 * tol {
                l + r + (l + r - whole) / 15.0
            } else {
                simpson(a, b, lo, mid, l, 0.5 * tol, depth - 1) + simpson(a, b, mid, hi, r, 0.5 * tol, depth - 1)
            }
        }
        let hi = 0.5 * PI;
        let whole = hi / 6.0 * (f(a, b, 0.0) + 4.0 * f(a, b, 0.5 * hi) + f(a, b, hi));
        4.0 * simpson(a, b, 0.0, hi, whole, 1e-14, 40)
    }

    #[test]
    fn ellipsoid_area_matches_closed_form() {
        // prolate spheroid a = b = 1, c = 2: 2 pi a^2 (1 + c/(a e) asin e)
        let m = BoundaryManifold::parse("ellipsoid:a=1,b=1,c=2").unwrap();
        let e = (1.0 - 0.25f64).sqrt();
        let exact = 2.0 * PI * (1.0 + 2.0 / e * e.asin());
        assert!((m.surface_quadrature(3).total_weight() - exact).abs() < 1e-9);
    }

    #[test]
    fn normals_are_unit_and_outward() {
        for m in shapes() {
            for p in m.surface_quadrature(1).nodes {
                assert!((p.normal.norm() - 1.0).abs() < 1e-12);
                assert!((p.x - m.inside_point()).dot(&p.normal) > 0.0, "{}", m.id());
                for t in m.tangents(&p.param) {
                    assert!(t.dot(&p.normal).abs() < 1e-12 * t.norm());
                }
            }
        }
    }

    #[test]
    fn chord_formulas_agree_with_direct_differences() {
        for m in shapes() {
            let rule = m.surface_quadrature(0);
            for p in rule.nodes.iter().step_by(7) {
                for q in rule.nodes.iter().step_by(5) {
                    let d = m.chord(&p.param, &q.param);
                    assert!((d - (p.x - q.x)).norm() < 1e-13, "{}", m.id());
                    let dn = m.chord_dot_normal(&p.param, &q.param);
                    assert!((dn - (p.x - q.x).dot(&q.normal)).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn periodicity_and_offsets() {
        let m = BoundaryManifold::parse("star:c=0.2,k=5").unwrap();
        let a = m.point(&Param::Angle(0.3));
        let b = m.point(&Param::Angle(0.3 + 2.0 * PI));
        assert!((a.x - b.x).norm() < 1e-14);
        let s = BoundaryManifold::parse("ellipsoid:a=1,b=1,c=2").unwrap();
        let w = Vec3::new(0.3, -0.4, 0.5).normalize();
        let q = s.offset(&Param::Dir(w), &[1e-3, 0.0]);
        let fd = (s.point(&q).x - s.point(&Param::Dir(w)).x) / 1e-3;
        assert!((fd - s.tangents(&Param::Dir(w))[0]).norm() < 2e-3);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(matches!(BoundaryManifold::parse("circle:R=-1"), Err(Error::BadShapeParameters { .. })));
        assert!(BoundaryManifold::parse("ellipse:a=2").is_err());
        assert!(BoundaryManifold::parse("star:c=1.5,k=5").is_err());
        assert!(BoundaryManifold::parse("torus:R=1").is_err());
        let err = BoundaryManifold::parse("circle:R=-1").unwrap_err().to_string();
        assert!(err.contains('R'));
    }

    #[test]
    fn quadrature_converges_super_algebraically_on_circle() {
        let m = BoundaryManifold::parse("circle:R=1").unwrap();
        let f = |p: &BoundaryPoint| C64::new((p.x[0] * 3.0).exp() * p.x[1].cos(), 0.0);
        let exact = m.surface_quadrature(6).integrate(f).re;
        let mut prev: Option<f64> = None;
        for level in 0..4u32 {
            let n = 8usize << level;
            let h = 2.0 * PI / n as f64;
            let approx: f64 = (0..n).map(|k| f(&m.point(&Param::Angle(h * k as f64))).re * h).sum();
            let err = (approx - exact).abs();
            if let Some(p) = prev {
                if p < 1e-4 && err > 1e-13 {
                    assert!(p / err >= 1e3, "level {level}: {p} -> {err}");
                }
            }
            prev = Some(err);
        }
    }

    #[test]
    fn singular_rules_integrate_constants() {
        for m in shapes() {
            let area = m.surface_quadrature(4).total_weight();
            let c = m.surface_quadrature(0).nodes[3].param;
            let r = m.singular_rule(&c, 1);
            assert!((r.total_weight() - area).abs() < 1e-9 * area, "{}", m.id());
        }
    }

    #[test]
    fn excised_and_ball_rules_partition_the_curve() {
        let m = BoundaryManifold::parse("ellipse:a=2,b=1").unwrap();
        let c = Param::Angle(0.4);
        for s in [1e-4, 0.01, 0.3] {
            let out = m.excised_rule(&c, s, 1).total_weight();
            let inn = m.ball_rule(&c, s, 1).total_weight();
            assert!((out + inn - ellipse_perimeter_oracle(2.0, 1.0)).abs() < 1e-11);
        }
        // circle arc outside B(x, r): 2pi - 4 asin(r/2)
        let m = BoundaryManifold::parse("circle:R=1").unwrap();
        for r in [1e-3, 0.1, 1.0, 1.9] {
            let w = m.excised_rule(&Param::Angle(1.0), r, 0).total_weight();
            assert!((w - (2.0 * PI - 4.0 * (0.5 * r).asin())).abs() < 1e-12);
        }
        assert!(m.excised_rule(&Param::Angle(1.0), 2.5, 0).is_empty());
    }

    #[test]
    fn excised_rule_on_sphere_matches_cap_area() {
        // area of the unit sphere outside B(x, r): 4 pi - pi r^2
        let m = BoundaryManifold::parse("sphere:R=1").unwrap();
        let c = Param::Dir(Vec3::new(0.2, 0.3, -0.9).normalize());
        for r in [1e-3, 0.05, 0.7, 1.5] {
            let w = m.excised_rule(&c, r, 0).total_weight();
            assert!((w - (4.0 * PI - PI * r * r)).abs() < 1e-10, "r={r}: {w}");
        }
    }

    #[test]
    fn mlr_examples() {
        let m = BoundaryManifold::parse("circle:R=1").unwrap();
        let x1 = |x: &Vec3| (C64::new(x[0], 0.0), CVec3::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        let f = SurfaceFunction::Ambient(&x1);
        for t in [0.1, 1.3, 3.0] {
            let v = m.tangential_derivative_mlr(&f, 0, 1, &Param::Angle(t)).unwrap();
            assert!((v.re + t.sin()).abs() < 1e-15);
            let g = m.tangential_gradient(&f, &Param::Angle(t));
            assert!((g[0].re - t.sin().powi(2)).abs() < 1e-15);
            assert!((g[1].re + t.sin() * t.cos()).abs() < 1e-15);
        }
        let cst = |_: &Param| C64::new(3.0, 0.0);
        let f = SurfaceFunction::Parametric(&cst);
        assert_eq!(m.tangential_derivative_mlr(&f, 0, 1, &Param::Angle(0.3)).unwrap(), C64::new(0.0, 0.0));
        assert!(matches!(m.tangential_derivative_mlr(&f, 0, 2, &Param::Angle(0.3)), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn sphere_height_gradient_magnitude() {
        let m = BoundaryManifold::parse("sphere:R=1").unwrap();
        let x3 = |p: &Param| C64::new(p.dir()[2], 0.0);
        let f = SurfaceFunction::Parametric(&x3);
        let rule = m.surface_quadrature(1);
        // first latitude ring is closest to the pole
        for p in rule.nodes.iter().take(32) {
            let g = m.tangential_gradient(&f, &p.param);
            let sin_phi = (1.0 - p.x[2] * p.x[2]).sqrt();
            assert!((g.norm() - sin_phi).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn component_identity_for_polynomials(shape in 0usize..6, node in 0usize..64, c in proptest::collection::vec(-2.0f64..2.0, 6)) {
            let m = &shapes()[shape];
            let rule = m.surface_quadrature(0);
            let p = rule.nodes[node % rule.len()].param;
            let poly = move |x: &Vec3| {
                let v = c[0] * x[0] * x[0] + c[1] * x[0] * x[1] + c[2] * x[1] + c[3] * x[2] * x[0] + c[4] * x[2] + c[5];
                let g = CVec3::new(
                    C64::new(2.0 * c[0] * x[0] + c[1] * x[1] + c[3] * x[2], 0.0),
                    C64::new(c[1] * x[0] + c[2], 0.0),
                    C64::new(c[3] * x[0] + c[4], 0.0),
                );
                (C64::new(v, 0.0), g)
            };
            let f = SurfaceFunction::Ambient(&poly);
            let g = m.tangential_gradient(&f, &p);
            let nu = m.point(&p).normal;
            prop_assert!(crate::cdot(&g, &nu).norm() < 1e-12 * (1.0 + g.norm()));
            for h in 0..m.dim() {
                let mut s = C64::new(0.0, 0.0);
                for l in 0..m.dim() {
                    s += nu[l] * m.tangential_derivative_mlr(&f, l, h, &p).unwrap();
                }
                prop_assert!((s - g[h]).norm() < 1e-10);
            }
            for l in 0..m.dim() {
                for r in 0..m.dim() {
                    let a = m.tangential_derivative_mlr(&f, l, r, &p).unwrap();
                    let b = m.tangential_derivative_mlr(&f, r, l, &p).unwrap();
                    prop_assert_eq!(a, -b);
                }
            }
        }

        #[test]
        fn parametric_gradient_matches_ambient(shape in 0usize..6, node in 0usize..64) {
            let m = &shapes()[shape];
            let rule = m.surface_quadrature(0);
            let p = rule.nodes[node % rule.len()].param;
            let amb = |x: &Vec3| (C64::new(x[0] * x[1] + x[2], 0.0), CVec3::new(C64::new(x[1], 0.0), C64::new(x[0], 0.0), C64::new(1.0, 0.0)));
            let mm = m.clone();
            let par = move |q: &Param| {
                let x = mm.point(q).x;
                C64::new(x[0] * x[1] + x[2], 0.0)
            };
            let a = m.tangential_gradient(&SurfaceFunction::Ambient(&amb), &p);
            let b = m.tangential_gradient(&SurfaceFunction::Parametric(&par), &p);
            prop_assert!((a - b).norm() < 1e-8);
        }
    }
}
