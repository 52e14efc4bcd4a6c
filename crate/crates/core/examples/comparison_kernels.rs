//! Mean-value inequalities on H³ from comparison kernels: the sub-Green
//! kernel of a more negatively curved model and the Euclidean sup-Green
//! kernel.

use mvlab::elliptic::{self, MvForm};
use mvlab::fields::{make_field, FieldName};
use mvlab::geometry::FlowGeometry;
use mvlab::kernels::Kernel;
use mvlab::sweep::Direction;

fn main() -> mvlab::Result<()> {
    let h3 = FlowGeometry::hyperbolic(3, 1.0)?;
    let v = make_field(FieldName::ExpRadial, &h3)?;
    let one = make_field(FieldName::Constant, &h3)?;

    for k in [1.0, 1.5, 2.0, 3.0] {
        let sub = Kernel::sub_green(h3.clone(), k)?;
        let d = elliptic::mv_inequality_deficit(&sub, &v, 1.0, MvForm::Sphere)?;
        println!("sub-green k={k:<4} deficit v(0) - J = {:+.3e}", d.value);
    }

    let sup = Kernel::sup_green(h3.clone())?;
    for form in [MvForm::Sphere, MvForm::Ball] {
        let d = elliptic::mv_inequality_deficit(&sup, &one, 1.0, form)?;
        println!("sup-green {form:?}: rhs - v(0) = {:+.3e}", d.value);
    }

    let sweep = elliptic::elliptic_sweep(&sup, &one, &[0.4, 0.7, 1.0, 1.3], Direction::NonDecreasing, 1e-6)?;
    for (r, d) in sweep.j.grid.iter().zip(&sweep.j_derivative) {
        println!("r={r:<4} dJ/dr={:+.4e} bound={:+.4e} holds={}", d.derivative, d.bound, d.holds);
    }
    Ok(())
}
