//! Runs a verification battery in-process and prints its JSON report.
//!
//! ```text
//! cargo run --release --example verify_suite -- reduced
//! ```

use mvlab::suites::{run_suite, Suite, SuiteConfig};

fn main() -> mvlab::Result<()> {
    let suite: Suite = std::env::args().nth(1).as_deref().unwrap_or("mcf").parse()?;
    let report = run_suite(suite, &SuiteConfig::default())?;
    eprint!("{}", report.summary());
    println!("{}", report.to_json()?);
    Ok(())
}
