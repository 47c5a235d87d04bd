//! Double layer potentials on the boundary: the constant density on round
//! shapes, and a trigonometric density on an ellipse under refinement.

use layerpot::dlp::DoubleLayer;
use layerpot::fundsol::{catalog_construct, CatalogKind};
use layerpot::geometry::{BoundaryManifold, BoundaryPoint, Param};
use layerpot::C64;

fn main() -> layerpot::Result<()> {
    for (op, id, level) in [("laplace", "circle:R=1", 2), ("laplace", "sphere:R=1", 3), ("yukawa3d:lambda=1", "sphere:R=1", 3)] {
        let m = BoundaryManifold::parse(id)?;
        let s = catalog_construct(&CatalogKind::parse(op)?, m.dim())?;
        let dl = DoubleLayer::new(&s, &m)?;
        let x = m.surface_quadrature(0).nodes[5].param;
        println!("{op:<20} {id:<12} W[1] = {:.15}", dl.eval_w1(&x, level)?.re);
    }

    let m = BoundaryManifold::parse("ellipse:a=2,b=1")?;
    let s = catalog_construct(&CatalogKind::parse("yukawa2d:lambda=1")?, 2)?;
    let dl = DoubleLayer::new(&s, &m)?;
    let mu = |p: &BoundaryPoint| C64::from((2.0 * p.param.angle()).cos());
    println!("\nyukawa2d on ellipse, mu = cos 2t, x at t = 1");
    for level in 0..5 {
        println!("  level {level}: W[mu] = {:.15e}", dl.eval_w(&mu, &Param::Angle(1.0), level, &[])?.re);
    }
    Ok(())
}
