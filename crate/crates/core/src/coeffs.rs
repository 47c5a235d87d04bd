//! Coefficients of the operator
//! `P[a,D] = sum_{l,j} d_l (a_lj d_j) + sum_l a_l d_l + a`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::{Mat3, C64, CVec3};

/// A multi-index of length n with |gamma| <= 2.
pub type MultiIndex = Vec<u32>;

/// Coefficients split into the real symmetric principal matrix, the complex
/// first-order vector and the complex zeroth-order scalar.
///
/// Matrices are stored as 3x3 with the block beyond `dim` padded by the
/// identity; vectors are padded with zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorCoefficients {
    dim: usize,
    a2: Mat3,
    a1: CVec3,
    a0: C64,
}

/// Lower-triangular factor `T` with `T T^t = a2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalFactor {
    pub t: Mat3,
    pub t_inv: Mat3,
    pub det_a2: f64,
}

impl OperatorCoefficients {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn a2(&self) -> &Mat3 {
        &self.a2
    }
    pub fn a1(&self) -> &CVec3 {
        &self.a1
    }
    pub fn a0(&self) -> C64 {
        self.a0
    }

    /// Builds coefficients directly from the split form.
    pub fn from_parts(dim: usize, a2: Mat3, a1: CVec3, a0: C64) -> Result<Self> {
        check_dim(dim)?;
        let mut m = Mat3::identity();
        let mut v = CVec3::zeros();
        for l in 0..dim {
            v[l] = a1[l];
            for j in 0..dim {
                m[(l, j)] = 0.5 * (a2[(l, j)] + a2[(j, l)]);
            }
        }
        let ell = ellipticity_constant(dim, &m);
        if ell <= 0.0 || !ell.is_finite() {
            return Err(Error::NonElliptic(ell));
        }
        Ok(Self { dim, a2: m, a1: v, a0 })
    }

    pub fn laplace(dim: usize) -> Result<Self> {
        Self::from_parts(dim, Mat3::identity(), CVec3::zeros(), C64::new(0.0, 0.0))
    }

    /// Returns the multi-index representation with every |gamma| <= 2 entry.
    pub fn multi_index_entries(&self) -> BTreeMap<MultiIndex, C64> {
        let n = self.dim;
        let mut out = BTreeMap::new();
        for gamma in all_multi_indices(n) {
            let order: u32 = gamma.iter().sum();
            let value = match order {
                0 => self.a0,
                1 => {
                    let l = gamma.iter().position(|&g| g == 1).unwrap();
                    self.a1[l]
                }
                _ => {
                    let idx: Vec<usize> = gamma
                        .iter()
                        .enumerate()
                        .flat_map(|(i, &g)| std::iter::repeat(i).take(g as usize))
                        .collect();
                    let (l, j) = (idx[0], idx[1]);
                    let f = if l == j { 1.0 } else { 2.0 };
                    C64::new(f * self.a2[(l, j)], 0.0)
                }
            };
            out.insert(gamma, value);
        }
        out
    }

    /// Serialises to lines `gamma=<i,j[,k]> re=<float> im=<float>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (gamma, v) in self.multi_index_entries() {
            let g: Vec<String> = gamma.iter().map(|x| x.to_string()).collect();
            writeln!(s, "gamma=<{}> re={:.17e} im={:.17e}", g.join(","), v.re, v.im).unwrap();
        }
        s
    }

    /// Parses the text format; the dimension is taken from the first entry.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut dim = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Config(format!("line {}: cannot parse `{raw}`", lineno + 1));
            let mut gamma = None;
            let mut re = 0.0;
            let mut im = 0.0;
            for tok in line.split_whitespace() {
                let (k, v) = tok.split_once('=').ok_or_else(bad)?;
                match k {
                    "gamma" => {
                        let inner = v.strip_prefix('<').and_then(|v| v.strip_suffix('>')).ok_or_else(bad)?;
                        let g: std::result::Result<Vec<u32>, _> =
                            inner.split(',').map(|p| p.trim().parse::<u32>()).collect();
                        gamma = Some(g.map_err(|_| bad())?);
                    }
                    "re" => re = v.parse().map_err(|_| bad())?,
                    "im" => im = v.parse().map_err(|_| bad())?,
                    _ => return Err(bad()),
                }
            }
            let gamma = gamma.ok_or_else(bad)?;
            match dim {
                None => dim = Some(gamma.len()),
                Some(d) if d != gamma.len() => return Err(bad()),
                _ => {}
            }
            entries.insert(gamma, C64::new(re, im));
        }
        let dim = dim.ok_or_else(|| Error::Config("no coefficient entries".into()))?;
        build_coefficients(dim, &entries)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::BadDimension(n))
    }
}

/// All multi-indices of length n with order at most two, in lexicographic
/// order.
pub fn all_multi_indices(n: usize) -> Vec<MultiIndex> {
    let mut out = vec![vec![0; n]];
    for l in 0..n {
        let mut g = vec![0; n];
        g[l] = 1;
        out.push(g);
    }
    for l in 0..n {
        for j in l..n {
            let mut g = vec![0; n];
            g[l] += 1;
            g[j] += 1;
            out.push(g);
        }
    }
    out.sort();
    out
}

/// Assembles coefficients from multi-index entries; missing entries are zero.
pub fn build_coefficients(n: usize, entries: &BTreeMap<MultiIndex, C64>) -> Result<OperatorCoefficients> {
    check_dim(n)?;
    let mut a2 = Mat3::zeros();
    let mut a1 = CVec3::zeros();
    let mut a0 = C64::new(0.0, 0.0);
    for (gamma, &v) in entries {
        if gamma.len() != n {
            return Err(Error::BadDimension(gamma.len()));
        }
        let order: u32 = gamma.iter().sum();
        match order {
            0 => a0 = v,
            1 => {
                let l = gamma.iter().position(|&g| g == 1).unwrap();
                a1[l] = v;
            }
            2 => {
                if v.im != 0.0 {
                    return Err(Error::ComplexPrincipalPart(format!("{gamma:?}")));
                }
                let idx: Vec<usize> = gamma
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &g)| std::iter::repeat(i).take(g as usize))
                    .collect();
                let (l, j) = (idx[0], idx[1]);
                if l == j {
                    a2[(l, l)] = v.re;
                } else {
                    a2[(l, j)] = 0.5 * v.re;
                    a2[(j, l)] = 0.5 * v.re;
                }
            }
            _ => {
                return Err(Error::Config(format!("multi-index {gamma:?} has order above two")));
            }
        }
    }
    for k in n..3 {
        a2[(k, k)] = 1.0;
    }
    let ell = ellipticity_constant(n, &a2);
    if ell <= 0.0 || !ell.is_finite() {
        return Err(Error::NonElliptic(ell));
    }
    Ok(OperatorCoefficients { dim: n, a2, a1, a0 })
}

/// Minimum eigenvalue of the leading n x n block of a symmetric matrix,
/// computed in closed form.
pub fn ellipticity_constant(n: usize, a2: &Mat3) -> f64 {
    match n {
        2 => {
            let (a, b, d) = (a2[(0, 0)], 0.5 * (a2[(0, 1)] + a2[(1, 0)]), a2[(1, 1)]);
            let half_tr = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            let lo = half_tr - disc;
            // Recompute the small root from the product for accuracy.
            let hi = half_tr + disc;
            if hi > 0.0 && lo.abs() < 1e-8 * hi {
                (a * d - b * b) / hi
            } else {
                lo
            }
        }
        3 => symmetric3_eigenvalues(a2)[0],
        _ => f64::NAN,
    }
}

/// Eigenvalues of a symmetric 3x3 matrix in ascending order, by the
/// trigonometric formula.
pub fn symmetric3_eigenvalues(a: &Mat3) -> [f64; 3] {
    let s = |i: usize, j: usize| 0.5 * (a[(i, j)] + a[(j, i)]);
    let p1 = s(0, 1).powi(2) + s(0, 2).powi(2) + s(1, 2).powi(2);
    let (d0, d1, d2) = (a[(0, 0)], a[(1, 1)], a[(2, 2)]);
    if p1 == 0.0 {
        let mut e = [d0, d1, d2];
        e.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return e;
    }
    let q = (d0 + d1 + d2) / 3.0;
    let p2 = (d0 - q).powi(2) + (d1 - q).powi(2) + (d2 - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = Mat3::new(
        (d0 - q) / p,
        s(0, 1) / p,
        s(0, 2) / p,
        s(0, 1) / p,
        (d1 - q) / p,
        s(1, 2) / p,
        s(0, 2) / p,
        s(1, 2) / p,
        (d2 - q) / p,
    );
    let r = (0.5 * b.determinant()).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let mid = 3.0 * q - hi - lo;
    [lo, mid, hi]
}

/// Cholesky factor of the leading n x n block, padded with the identity.
pub fn principal_factor(n: usize, a2: &Mat3) -> Result<PrincipalFactor> {
    check_dim(n)?;
    let mut t = Mat3::identity();
    for j in 0..n {
        let mut d = a2[(j, j)];
        for k in 0..j {
            d -= t[(j, k)] * t[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        t[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut v = a2[(i, j)];
            for k in 0..j {
                v -= t[(i, k)] * t[(j, k)];
            }
            t[(i, j)] = v / djj;
        }
    }
    let mut det = 1.0;
    for j in 0..n {
        det *= t[(j, j)] * t[(j, j)];
    }
    let t_inv = lower_inverse(&t);
    Ok(PrincipalFactor { t, t_inv, det_a2: det })
}

fn lower_inverse(t: &Mat3) -> Mat3 {
    let mut inv = Mat3::zeros();
    for j in 0..3 {
        inv[(j, j)] = 1.0 / t[(j, j)];
        for i in (j + 1)..3 {
            let mut s = 0.0;
            for k in j..i {
                s += t[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / t[(i, i)];
        }
    }
    inv
}
