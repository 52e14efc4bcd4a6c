//! Analytic space-time Christoffel symbols and divergences against finite
//! differences on every model.

use mvlab::geometry::{FlowGeometry, ProbeField, SpaceTimePoint};

fn main() -> mvlab::Result<()> {
    let models = [
        FlowGeometry::euclidean(3),
        FlowGeometry::hyperbolic(3, 1.0)?,
        FlowGeometry::shrinking_sphere(3)?,
        FlowGeometry::gaussian_soliton(3),
    ];
    for g in &models {
        let p = SpaceTimePoint::with_direction(0.8, vec![0.3, -0.5, 0.8], -0.2);
        for h in [1e-2, 1e-3, 1e-4] {
            let c = g.spacetime_christoffels(&p)?.max_abs_diff(&g.spacetime_christoffels_fd(&p, h)?);
            let d = (g.spacetime_divergence(&ProbeField, &p)? - g.spacetime_divergence_fd(&ProbeField, &p, h)?).abs();
            println!("{:<28} h={h:.0e}  christoffel {c:.2e}  divergence {d:.2e}", format!("{:?}", g.kind()));
        }
    }
    Ok(())
}
