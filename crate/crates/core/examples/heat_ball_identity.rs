//! The heat-ball and heat-sphere mean-value identities for the exact heat
//! kernel, on the plane and on hyperbolic space.

use mvlab::fields::{make_field, FieldName};
use mvlab::geometry::FlowGeometry;
use mvlab::kernels::Kernel;
use mvlab::parabolic;
use mvlab::regions::LevelRegion;

fn main() -> mvlab::Result<()> {
    let e2 = FlowGeometry::euclidean(2);
    let heat = Kernel::heat(e2.clone())?;
    let u = make_field(FieldName::CaloricQuadratic, &e2)?;
    for r in [0.5, 1.0] {
        let region = LevelRegion::heat_ball(heat.clone(), r)?;
        let ball = parabolic::mv_heat_ball(&heat, &u, r)?;
        let sphere = parabolic::mv_heat_sphere(&heat, &u, r)?;
        println!(
            "R^2 r={r}: tau_max={:.6} ball rhs={:+.3e} sphere rhs={:+.3e}",
            region.tau_max().unwrap_or(f64::NAN),
            ball.rhs.value,
            sphere.rhs.value
        );
    }

    let h3 = FlowGeometry::hyperbolic(3, 1.0)?;
    let heat = Kernel::heat(h3.clone())?;
    for name in [FieldName::Constant, FieldName::ExpRadial, FieldName::GaussianTranslate] {
        let v = make_field(name, &h3)?;
        let check = parabolic::mv_heat_sphere(&heat, &v, 0.5)?;
        println!("H^3 {name:<18} v(0)={:.10} rhs={:.10} residual {:.1e}", check.lhs, check.rhs.value, check.residual);
    }
    Ok(())
}
