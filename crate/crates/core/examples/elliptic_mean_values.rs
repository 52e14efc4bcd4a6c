//! Mean-value identities for the exact Green's function on R³ and H³.
//!
//! ```text
//! cargo run --release --example elliptic_mean_values
//! ```

use mvlab::elliptic::{self, MvForm};
use mvlab::fields::{make_field, FieldName};
use mvlab::geometry::FlowGeometry;
use mvlab::kernels::Kernel;

fn main() -> mvlab::Result<()> {
    for geom in [FlowGeometry::euclidean(3), FlowGeometry::hyperbolic(3, 1.0)?] {
        let green = Kernel::exact_green(geom.clone())?;
        println!("{:?}", geom.kind());
        for name in [FieldName::Constant, FieldName::Superharmonic, FieldName::ExpRadial] {
            let v = make_field(name, &geom)?;
            for r in [0.5, 1.0] {
                let j = elliptic::j_v(&green, &v, r)?;
                let sphere = elliptic::mv_identity(&green, &v, r, MvForm::Sphere)?;
                let ball = elliptic::mv_identity(&green, &v, r, MvForm::Ball)?;
                println!(
                    "  {name:<14} r={r:<4} J={:.12} sphere residual {:.1e} ball residual {:.1e}",
                    j.value, sphere.residual, ball.residual
                );
            }
        }
    }
    Ok(())
}
