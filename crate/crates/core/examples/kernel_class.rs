//! Sampled kernel-class norms of the double layer kernel and its tangential
//! gradient, with the algebra inequalities checked on the same samples.

use layerpot::dlp::{DlpKernel, DoubleLayer, TangentialGradientKernel};
use layerpot::fundsol::{catalog_construct, CatalogKind};
use layerpot::geometry::BoundaryManifold;
use layerpot::kernelclass::{class_norm, verify_kernel_algebra, Exponents};

fn main() -> layerpot::Result<()> {
    let m = BoundaryManifold::parse("sphere:R=1")?;
    let s = catalog_construct(&CatalogKind::parse("yukawa3d:lambda=1")?, 3)?;
    let dl = DoubleLayer::new(&s, &m)?;
    let ek = Exponents::new(1.0, 2.0, 1.0);
    for (name, e) in [
        ("kernel (1, 2, 1)", class_norm(&DlpKernel(dl), &m, ek, 1, 3)?),
        ("tangential gradient (2, 3, 1)", class_norm(&TangentialGradientKernel(dl), &m, Exponents::new(2.0, 3.0, 1.0), 1, 3)?),
    ] {
        println!("{name}");
        for t in &e.refinement_trace {
            println!("  level {}  pairs {:>6}  first {:.6e}  second {:.6e}", t.level, t.n_pairs, t.first_sup, t.second_sup);
        }
    }
    let r = verify_kernel_algebra(&DlpKernel(dl), ek, &DlpKernel(dl), ek, &m, None, 1, 4096)?;
    for c in &r.checks {
        println!("{:<30} violations {} / {}  max ratio {:.3}", c.name, c.violations, c.samples, c.max_ratio);
    }
    Ok(())
}
