//! Truncated integrals of the tangential gradient of the double layer kernel
//! over the boundary outside shrinking balls.

use layerpot::dlp::{maximal_function_condition, maximal_radii, DoubleLayer};
use layerpot::fundsol::{catalog_construct, CatalogKind};
use layerpot::geometry::BoundaryManifold;

fn main() -> layerpot::Result<()> {
    for id in ["circle:R=1", "ellipse:a=2,b=1", "star:c=0.2,k=5"] {
        let m = BoundaryManifold::parse(id)?;
        let s = catalog_construct(&CatalogKind::Laplace, 2)?;
        let dl = DoubleLayer::new(&s, &m)?;
        let e = maximal_function_condition(&dl, 2, &maximal_radii(&m))?;
        println!("{id}: sup {:.6e} at {:?}", e.sup, e.witness);
        for (r, v) in e.curve.iter().step_by(3) {
            println!("  r = {r:.3e}  max |integral| = {v:.6e}");
        }
    }
    Ok(())
}
