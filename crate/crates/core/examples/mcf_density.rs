//! Gaussian density and the monotone quantities of the shrinking round
//! sphere under mean curvature flow.

use mvlab::mcf::{gaussian_density_closed_form, mcf_sweep, ShrinkingSphereMcf};

fn main() -> mvlab::Result<()> {
    for n in 1..=3 {
        let flow = ShrinkingSphereMcf::new(n)?;
        let theta = flow.gaussian_density()?;
        println!("n={n}: Theta={:.12} closed form {:.12}", theta.value, gaussian_density_closed_form(n));
        let (jbar, ibar) = mcf_sweep(&flow, &[0.3, 0.6, 0.9], 0.1, 1e-6)?;
        for (i, r) in jbar.grid.iter().enumerate() {
            println!("  r={r}: level time {:.6}  jbar={:.10}  ibar={:.10}", flow.level_time(*r)?, jbar.values[i], ibar.values[i]);
        }
    }
    let shifted = ShrinkingSphereMcf::with_center(1, vec![0.3, -0.2])?;
    let res = shifted.harnack_residuals(&[(0.5, 0.1), (2.0, 0.5)])?;
    println!("off-center decomposition residuals {res:?}");
    Ok(())
}
