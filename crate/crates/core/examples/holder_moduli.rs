//! Moduli of continuity, sampled Hoelder seminorms and the exponent case
//! analysis.

use layerpot::geometry::{BoundaryManifold, BoundaryPoint};
use layerpot::holder::{holder_seminorm, iokreg_classify, omega_theta, EstimatorConfig, Modulus};
use layerpot::C64;

fn main() -> layerpot::Result<()> {
    for r in [1e-6, 1e-3, 0.1, (-1.0f64).exp(), 1.0] {
        println!("omega_1({r:.3e}) = {:.6e}", omega_theta(1.0, r)?);
    }
    println!("{:?}", Modulus::OmegaTheta(0.5).check());

    let m = BoundaryManifold::parse("circle:R=1")?;
    let half = |p: &BoundaryPoint| C64::from((0.5 * p.param.angle()).sin().abs().sqrt());
    let cfg = EstimatorConfig::default();
    for alpha in [0.5, 0.6] {
        let e = holder_seminorm(&half, &m, &Modulus::Power(alpha), 1, 4, &cfg);
        println!("|sin(t/2)|^(1/2) against power({alpha}): trace {:?} stable {}", e.trace, e.stable);
    }

    for (t1, t2, t3, beta) in [(2.25, 3.0, 0.75, 0.5), (2.0, 3.0, 1.0, 0.5), (2.0, 3.0, 1.0, 1.0)] {
        let c = iokreg_classify(3, 1.0, t1, t2, t3, beta)?;
        println!("t = ({t1}, {t2}, {t3}), beta = {beta}: case {} modulus {}", c.label(), c.target_modulus.label());
    }
    Ok(())
}
