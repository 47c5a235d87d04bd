use layerpot::cli::{curve_csv, parse_curve_csv, Curve};
use layerpot::fundsol::{catalog_construct, CatalogKind};
use layerpot::geometry::{BoundaryManifold, BoundaryPoint};
use layerpot::holder::{self, iokreg_classify, omega_theta, Density, EstimatorConfig, Modulus};
use layerpot::kernelclass::{class_norm, Exponents, FnKernel, Scaled};
use layerpot::sampling::Sampler;
use layerpot::C64;
use proptest::prelude::*;

fn trig(coef: Vec<f64>) -> impl Fn(&BoundaryPoint) -> C64 + Sync {
    move |p: &BoundaryPoint| {
        let t = p.param.angle();
        C64::from(coef.iter().enumerate().map(|(k, c)| if k % 2 == 0 { c * ((k / 2) as f64 * t).cos() } else { c * ((k / 2 + 1) as f64 * t).sin() }).sum::<f64>())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn omega_and_power_moduli_pass_the_grid_check(theta in 0.02f64..=1.0, alpha in 0.02f64..=1.0) {
        prop_assert!(Modulus::OmegaTheta(theta).check().passed);
        prop_assert!(Modulus::Power(alpha).check().passed);
        prop_assert!(Modulus::Max(vec![Modulus::Power(alpha), Modulus::OmegaTheta(theta)]).check().passed);
    }

    #[test]
    fn omega_theta_is_monotone_with_a_constant_tail(theta in 0.05f64..=1.0, r in 1e-12f64..5.0) {
        let rt = (-1.0 / theta).exp();
        let w = omega_theta(theta, r).unwrap();
        prop_assert!(w > 0.0);
        prop_assert!(omega_theta(theta, 1.01 * r).unwrap() >= w);
        if r >= rt {
            prop_assert_eq!(w, omega_theta(theta, rt).unwrap());
        }
    }

    #[test]
    fn case_analysis_exponent_never_exceeds_beta(
        n in 2usize..=3,
        beta in 0.01f64..=1.0,
        u1 in 0.0f64..1.0,
        t3 in 0.01f64..=1.0,
        u2 in 0.0f64..1.0,
        edge in any::<bool>(),
    ) {
        let nm = n as f64 - 1.0;
        let t1 = beta + u1 * nm;
        let t2 = if edge { nm + beta } else { nm + beta + t3 * (0.001 + 0.998 * u2) };
        let c = iokreg_classify(n, 0.0, t1, t2, t3, beta).unwrap();
        let e = c.target_modulus.exponent().unwrap();
        prop_assert!(e <= beta);
        if t1 <= nm && t2 <= nm + t3 {
            prop_assert_eq!(e, beta);
        }
    }

    #[test]
    fn hypotheses_outside_the_theorem_are_rejected(beta in 0.1f64..=1.0, t3 in 0.1f64..=1.0) {
        prop_assert!(iokreg_classify(3, 2.0, 2.0, 3.0, t3, beta).is_err());
        prop_assert!(iokreg_classify(3, 1.0, 2.0 + beta, 3.0, t3, beta).is_err());
        prop_assert!(iokreg_classify(3, 1.0, 2.0, 2.0 + beta + t3, t3, beta).is_err());
        prop_assert!(iokreg_classify(3, 1.0, 2.0, 1.9 + beta, t3, beta).is_err());
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec((any::<f64>(), any::<f64>()), 0..40)) {
        let rows: Vec<[f64; 2]> = rows.into_iter().filter(|(a, b)| a.is_finite() && b.is_finite()).map(|(a, b)| [a, b]).collect();
        let c = Curve { columns: ["separation".into(), "quotient".into()], rows: rows.clone() };
        let back = parse_curve_csv(&curve_csv(&c)).unwrap();
        let mut want = rows;
        want.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        prop_assert_eq!(back.len(), want.len());
        for (a, b) in back.iter().zip(&want) {
            prop_assert_eq!(a[0].to_bits(), b[0].to_bits());
            prop_assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn remark_bound_holds_for_trigonometric_polynomials(
        coef in prop::collection::vec(-2.0f64..2.0, 1..8),
        a in 0.05f64..2.0,
        seed in 0u64..1000,
        which in 0usize..3,
    ) {
        let m = BoundaryManifold::parse("ellipse:a=2,b=1").unwrap();
        let modulus = [Modulus::Power(1.0), Modulus::Power(0.3), Modulus::OmegaTheta(0.7)][which].clone();
        let r = holder::remark_bound_check(&trig(coef), &m, &modulus, a, seed, 2048);
        prop_assert_eq!(r.violations, 0);
    }

    #[test]
    fn seminorm_ignores_constants(coef in prop::collection::vec(-2.0f64..2.0, 1..6), c in -5.0f64..5.0) {
        let m = BoundaryManifold::parse("circle:R=1").unwrap();
        let cfg = EstimatorConfig::default();
        let f = trig(coef);
        let g = |p: &BoundaryPoint| f(p) + c;
        let a = holder::holder_seminorm(&f, &m, &Modulus::Power(0.5), 3, 1, &cfg).seminorm;
        let b = holder::holder_seminorm(&g, &m, &Modulus::Power(0.5), 3, 1, &cfg).seminorm;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn triples_are_admissible_for_any_seed(seed in any::<u64>(), chunk in 0u64..1000) {
        for b in ["star:c=0.3,k=3", "ellipsoid:a=1,b=2,c=0.5"] {
            let m = BoundaryManifold::parse(b).unwrap();
            for t in Sampler::new(&m, seed).triple_chunk(chunk) {
                prop_assert!(t.d1y >= 2.0 * t.d12);
                prop_assert!(t.comparison_holds());
            }
        }
    }

    #[test]
    fn class_norm_scales_linearly(c in -8.0f64..8.0) {
        let m = BoundaryManifold::parse("ellipse:a=2,b=1").unwrap();
        let k = FnKernel(|x: &BoundaryPoint, y: &BoundaryPoint| C64::from((x.x - y.x).norm().ln()));
        let e = Exponents::new(0.1, 1.1, 1.0);
        let base = class_norm(&k, &m, e, 2, 0).unwrap();
        let scaled = class_norm(&Scaled { kernel: &k, factor: C64::from(c) }, &m, e, 2, 0).unwrap();
        prop_assert!((scaled.norm() - c.abs() * base.norm()).abs() <= 1e-12 * base.norm() * c.abs().max(1.0));
    }
}

#[test]
fn regularity_ratio_is_invariant_under_density_scaling() {
    let s = catalog_construct(&CatalogKind::Laplace, 2).unwrap();
    let m = BoundaryManifold::parse("ellipse:a=2,b=1").unwrap();
    let cfg = EstimatorConfig::default();
    let base = holder::regularity_report(&s, &m, &[Density::kink("k", 1.1, 0.5)], 0.5, 1, &cfg).unwrap();
    for c in [0.25, 3.0, 1024.0, 1e-3] {
        let r = holder::regularity_report(&s, &m, &[Density::kink("k", 1.1, 0.5).scaled(c)], 0.5, 1, &cfg).unwrap();
        let (a, b) = (base.densities[0].ratio, r.densities[0].ratio);
        if (c as f64).log2().fract() == 0.0 {
            assert_eq!(a, b, "c = {c}");
        } else {
            assert!((a - b).abs() <= 1e-13 * a, "c = {c}: {a} {b}");
        }
    }
}
