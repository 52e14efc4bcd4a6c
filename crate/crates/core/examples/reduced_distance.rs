//! Reduced distance by L-geodesic shooting on the shrinking 3-sphere,
//! compared with its closed form, and the reduced volume along the flow.

use mvlab::geometry::FlowGeometry;
use mvlab::reduced::ReducedDistanceField;
use mvlab::suites::sphere_ell_closed_form;

fn main() -> mvlab::Result<()> {
    let sphere = FlowGeometry::shrinking_sphere(3)?;
    let field = ReducedDistanceField::new(sphere.clone());
    println!("{:>6} {:>6} {:>16} {:>16}", "rho", "tau", "shooting", "closed form");
    for (rho, tau) in [(0.0, 0.1), (0.5, 0.1), (1.0, 0.2), (1.5, 0.3)] {
        println!("{rho:>6} {tau:>6} {:>16.12} {:>16.12}", field.reduced_distance(rho, tau)?, sphere_ell_closed_form(&sphere, rho, tau));
    }
    for tau in [0.05, 0.1, 0.2, 0.3] {
        println!("theta({tau}) = {:.8}", field.reduced_volume(tau)?.value);
    }
    println!("memoized evaluations: {}", field.memo_len());
    Ok(())
}
