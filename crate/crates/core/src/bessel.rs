//! Modified Bessel functions of order zero.
//!
//! `k0` uses the ascending series for small arguments and Steed's continued
//! fraction beyond; `i0` uses the ascending series up to the switch point and
//! the Hankel asymptotic series above it.

use std::f64::consts::PI;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const K0_SERIES_MAX: f64 = 2.0;
const I0_SERIES_MAX: f64 = 30.0;

/// I_0(x) for x >= 0.
pub fn i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_MAX {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term < 1e-17 * sum {
                return sum;
            }
            k += 1.0;
        }
    }
    // Hankel expansion; all terms positive for order zero.
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        let kf = k as f64;
        term *= (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * x);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    x.exp() / (2.0 * PI * x).sqrt() * sum
}

/// K_0(x) for x > 0.
pub fn k0(x: f64) -> f64 {
    assert!(x > 0.0, "k0 requires a positive argument");
    if x <= K0_SERIES_MAX {
        k0_series(x)
    } else {
        k0_steed(x)
    }
}

/// Ascending series K_0(x) = -(ln(x/2)+gamma) I_0(x) + sum_k H_k (x^2/4)^k/(k!)^2.
pub fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let lead = -((0.5 * x).ln() + EULER_GAMMA);
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = lead;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        harmonic += 1.0 / k;
        let add = term * (lead + harmonic);
        sum += add;
        if term * (1.0 + harmonic + lead.abs()) < 1e-18 * sum.abs().max(1e-300) {
            return sum;
        }
        k += 1.0;
        if k > 200.0 {
            return sum;
        }
    }
}

fn k0_steed(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() / s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite_rule;

    /// K_0(z) = int_0^inf exp(-z cosh t) dt, truncated where the integrand
    /// drops below underflow.
    fn k0_integral(z: f64) -> f64 {
        let tmax = (2.0 * 745.0 / z).ln().max(1.0) + 1.0;
        let breaks: Vec<f64> = (0..=200).map(|i| tmax * i as f64 / 200.0).collect();
        let (t, w) = composite_rule(&breaks, 20);
        t.iter().zip(&w).map(|(ti, wi)| wi * (-z * ti.cosh()).exp()).sum()
    }

    /// I_0(z) = (1/pi) int_0^pi exp(z cos t) dt.
    fn i0_integral(z: f64) -> f64 {
        let breaks: Vec<f64> = (0..=64).map(|i| PI * i as f64 / 64.0).collect();
        let (t, w) = composite_rule(&breaks, 20);
        t.iter().zip(&w).map(|(ti, wi)| wi * (z * ti.cos()).exp()).sum::<f64>() / PI
    }

    #[test]
    fn k0_matches_integral_representation() {
        for z in [0.05, 0.3, 1.0, 1.99, 2.01, 5.0, 8.0, 8.5, 15.0, 40.0] {
            let a = k0(z);
            let b = k0_integral(z);
            assert!(((a - b) / b).abs() < 1e-11, "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn i0_matches_integral_representation() {
        for z in [0.0, 0.3, 1.0, 8.0, 29.0, 31.0, 50.0] {
            let a = i0(z);
            let b = i0_integral(z);
            assert!(((a - b) / b).abs() < 1e-12, "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn k0_branches_agree_near_switch() {
        let z = K0_SERIES_MAX;
        let a = k0_series(z);
        let b = k0_steed(z);
        assert!(((a - b) / b).abs() < 1e-13);
    }

    #[test]
    fn reference_values() {
        assert!((k0(0.3) - 1.372_460_060_544_297_4).abs() < 1e-14);
        assert!((k0(1.0) - 0.421_024_438_240_708_3).abs() < 1e-15);
        assert!((i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-15);
    }
}
