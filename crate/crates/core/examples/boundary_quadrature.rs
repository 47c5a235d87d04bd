//! Perimeters and areas from the global boundary rules, and the adapted rule
//! around a singular point.

use layerpot::geometry::{BoundaryManifold, Param};

fn main() -> layerpot::Result<()> {
    for id in ["circle:R=1", "ellipse:a=2,b=1", "star:c=0.2,k=5", "sphere:R=1", "ellipsoid:a=1,b=1,c=2"] {
        let m = BoundaryManifold::parse(id)?;
        let measures: Vec<String> = (0..4).map(|l| format!("{:.15}", m.surface_quadrature(l).total_weight())).collect();
        println!("{id:<24} diameter {:.4}  measure by level {}", m.diameter(), measures.join(" "));
    }
    let m = BoundaryManifold::parse("ellipse:a=2,b=1")?;
    let rule = m.singular_rule(&Param::Angle(0.4), 2);
    println!("\nsingular rule at t = 0.4: {} nodes, total weight {:.15}", rule.len(), rule.total_weight());
    Ok(())
}
