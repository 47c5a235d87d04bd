//! Evaluates catalog fundamental solutions and runs their structural checks.

use layerpot::fundsol::{catalog_construct, default_catalog, CatalogKind};
use layerpot::Vec3;

fn main() -> layerpot::Result<()> {
    for (kind, dim) in default_catalog() {
        let s = catalog_construct(&kind, dim)?;
        let r = s.verify_structure(128);
        println!(
            "{:<40} n={dim} pde residual {:.2e}  gradient fd {:.2e}  passed {}",
            s.id(),
            r.pde_residual,
            r.gradient_fd_residual,
            r.passed
        );
    }
    let s = catalog_construct(&CatalogKind::parse("yukawa3d:lambda=2")?, 3)?;
    let x = Vec3::new(0.3, -0.2, 0.5);
    println!("\nS(x) = {:.15e}", s.value(&x)?);
    // P S = delta with P = Delta - lambda^2
    println!("-exp(-2|x|)/(4 pi |x|) = {:.15e}", -(-2.0 * x.norm()).exp() / (4.0 * std::f64::consts::PI * x.norm()));
    Ok(())
}
