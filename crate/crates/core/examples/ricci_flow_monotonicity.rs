//! Ĵ and Î for the sub-heat kernel: constant on the Gaussian soliton,
//! strictly decreasing on the shrinking 3-sphere.

use std::sync::Arc;

use mvlab::geometry::FlowGeometry;
use mvlab::kernels::Kernel;
use mvlab::parabolic;
use mvlab::reduced::ReducedDistanceField;

fn main() -> mvlab::Result<()> {
    let grid = [0.3, 0.5, 0.7];
    for geom in [FlowGeometry::gaussian_soliton(3), FlowGeometry::shrinking_sphere(3)?] {
        let kernel = Kernel::sub_heat(Arc::new(ReducedDistanceField::new(geom.clone())));
        let sweep = parabolic::jhat_sweep(&kernel, &grid, 0.2, 1e-6)?;
        println!("{:?}", geom.kind());
        for (i, r) in grid.iter().enumerate() {
            println!(
                "  r={r}: jhat={:.8} ihat(0.2, r)={:.8} slope={:+.3e}",
                sweep.jhat.values[i], sweep.ihat.values[i], sweep.jhat_slopes[i]
            );
        }
        let ly = parabolic::harnack_rcf_residuals(&kernel, &[(0.2, 0.1), (0.6, 0.2)])?;
        println!("  harnack decomposition residuals {ly:?}");
        println!("  monotone and ordered: {}", sweep.pass());
    }
    Ok(())
}
