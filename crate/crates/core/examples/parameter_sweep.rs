//! Builds a sweep request programmatically and writes the CSV table that
//! `mvlab sweep` would print.

use mvlab::cli::{linspace, parse_model, run_sweep, Quantity, SweepRequest};
use mvlab::fields::FieldName;
use mvlab::report::write_sweep_csv;

fn main() -> mvlab::Result<()> {
    let req = SweepRequest {
        quantity: Quantity::J,
        model: parse_model("hyperbolic3", None)?,
        field: FieldName::Superharmonic,
        grid: linspace(0.2, 1.2, 6)?,
        a: 0.0,
        tol_scale: 1.0,
    };
    let sweep = run_sweep(&req)?;
    write_sweep_csv(&sweep, std::io::stdout())?;
    eprintln!("{} {:?}: monotone = {}", sweep.quantity, sweep.direction, sweep.monotone());
    Ok(())
}
