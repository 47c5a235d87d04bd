//! One-dimensional quadrature building blocks.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (
        x.iter().map(|t| c + h * t).collect(),
        w.iter().map(|wi| h * wi).collect(),
    )
}

/// Panel breakpoints on [a, b] refined geometrically towards the end points
/// whose flags are set. `first` is the length of the innermost panel.
pub fn graded_breakpoints(a: f64, b: f64, first: f64, grade_left: bool, grade_right: bool) -> Vec<f64> {
    graded_breakpoints_capped(a, b, first, grade_left, grade_right, f64::INFINITY)
}

/// As [`graded_breakpoints`], with panel lengths capped at `max_len`.
pub fn graded_breakpoints_capped(
    a: f64,
    b: f64,
    first: f64,
    grade_left: bool,
    grade_right: bool,
    max_len: f64,
) -> Vec<f64> {
    let len = b - a;
    if len <= 0.0 {
        return vec![a, b];
    }
    let first = first.min(0.5 * len).max(len * 1e-15);
    let mut left = vec![a];
    let mut right = vec![b];
    let mid = if grade_left && grade_right {
        a + 0.5 * len
    } else if grade_left {
        b
    } else {
        a
    };
    if grade_left {
        let mut h = first;
        let mut pos = a + first;
        while pos < mid - 0.5 * h.min(max_len) {
            left.push(pos);
            h = (2.0 * h).min(max_len);
            pos += h;
        }
    }
    if grade_right {
        let mut h = first;
        let mut pos = b - first;
        while pos > mid + 0.5 * h.min(max_len) {
            right.push(pos);
            h = (2.0 * h).min(max_len);
            pos -= h;
        }
    }
    if grade_left && grade_right {
        left.push(mid);
    }
    right.reverse();
    left.extend(right);
    left.dedup_by(|x, y| (*x - *y).abs() < 1e-300);
    left
}

/// Composite Gauss-Legendre rule over consecutive panels.
pub fn composite_rule(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(order * breaks.len());
    let mut weights = Vec::with_capacity(order * breaks.len());
    for pair in breaks.windows(2) {
        let h = 0.5 * (pair[1] - pair[0]);
        let c = 0.5 * (pair[0] + pair[1]);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(c + h * xi);
            weights.push(h * wi);
        }
    }
    (nodes, weights)
}

/// Equispaced periodic trapezoid nodes on [0, 2pi) with uniform weights.
pub fn periodic_trapezoid(n: usize, offset: f64) -> (Vec<f64>, f64) {
    let h = 2.0 * PI / n as f64;
    ((0..n).map(|k| offset + h * k as f64).collect(), h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 12, 40] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((s - exact).abs() < 1e-13, "n={n} deg={deg} got {s}");
            }
        }
    }

    #[test]
    fn gauss_legendre_small_cases() {
        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-16);
        assert_relative_eq!(w[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn graded_rule_handles_log_endpoint() {
        let b = graded_breakpoints(0.0, 1.0, 1e-12, true, false);
        assert!(b.windows(2).all(|p| p[1] > p[0]));
        let (x, w) = composite_rule(&b, 12);
        let s: f64 = x.iter().zip(&w).map(|(t, wi)| wi * t.ln()).sum();
        assert_relative_eq!(s, -1.0, epsilon = 1e-11);
    }

    #[test]
    fn graded_rule_two_sided() {
        let b = graded_breakpoints(0.0, 2.0, 1e-13, true, true);
        let (x, w) = composite_rule(&b, 10);
        let s: f64 = x.iter().zip(&w).map(|(t, wi)| wi * (t * (2.0 - t)).ln()).sum();
        // int_0^2 ln t + ln(2-t) dt = 2 (2 ln 2 - 2)
        assert_relative_eq!(s, 2.0 * (2.0 * 2f64.ln() - 2.0), epsilon = 1e-10);
    }
}
