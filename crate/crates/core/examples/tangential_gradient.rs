//! The tangential gradient of the double layer kernel against central
//! differences, and tangential derivatives of W[1].

use layerpot::dlp::DoubleLayer;
use layerpot::fundsol::{catalog_construct, CatalogKind};
use layerpot::geometry::{BoundaryManifold, Param};
use layerpot::kernelclass::magnitude;

fn main() -> layerpot::Result<()> {
    let m = BoundaryManifold::parse("ellipsoid:a=1,b=1,c=2")?;
    let s = catalog_construct(&CatalogKind::parse("helmholtz3d:k=2")?, 3)?;
    let dl = DoubleLayer::new(&s, &m)?;
    let nodes = m.surface_quadrature(0).nodes;
    for (i, j) in [(0, 40), (3, 77), (10, 120)] {
        let (x, y) = (&nodes[i], &nodes[j]);
        let g = dl.tangential_gradient(x, y)?;
        let fd = dl.tangential_gradient_fd(x, y)?;
        println!("|x-y| = {:.3}  |grad K| = {:.6e}  relative difference {:.2e}", (x.x - y.x).norm(), magnitude(&g), magnitude(&(g - fd)) / magnitude(&g));
    }

    let m = BoundaryManifold::parse("ellipse:a=2,b=1")?;
    let s = catalog_construct(&CatalogKind::Laplace, 2)?;
    let dl = DoubleLayer::new(&s, &m)?;
    let x = Param::Angle(0.8);
    println!("\nM_12 W[1] on the ellipse (W[1] is constant there): {:.3e}", dl.tangential_derivatives_w1(0, 1, &x, 2)?.norm());
    Ok(())
}
