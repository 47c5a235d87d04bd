//! Hoelder regularity of the tangential derivative of W[mu] for densities
//! with a kink of exponent beta on an ellipse.

use layerpot::fundsol::{catalog_construct, CatalogKind};
use layerpot::geometry::BoundaryManifold;
use layerpot::holder::{regularity_report, Density, EstimatorConfig};

fn main() -> layerpot::Result<()> {
    let s = catalog_construct(&CatalogKind::Laplace, 2)?;
    let m = BoundaryManifold::parse("ellipse:a=2,b=1")?;
    let densities: Vec<Density> = [0.25, 0.5, 0.75, 1.0].iter().map(|b| Density::kink(&format!("kink {b}"), 0.7, *b)).collect();
    let r = regularity_report(&s, &m, &densities, 0.5, 3, &EstimatorConfig::default())?;
    for d in &r.densities {
        println!(
            "{:<9} {:<6} {:<24} seminorm {:?}  ratio {:.4}  {} growth {:+.2}%",
            d.density,
            d.classification,
            d.modulus.label(),
            d.seminorm_trace.iter().map(|t| t.1).collect::<Vec<_>>(),
            d.ratio,
            d.strong_modulus.label(),
            100.0 * d.strong_growth
        );
    }
    Ok(())
}
