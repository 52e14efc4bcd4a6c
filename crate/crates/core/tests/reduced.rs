use mvlab::geometry::FlowGeometry;
use mvlab::numerics::FD_STEP;
use mvlab::reduced::ReducedDistanceField;
use proptest::prelude::*;

// [DERIVED] On the shrinking n-sphere the minimizing L-geodesic from the pole
// is radial with constant comoving momentum. With a = (n−1)/2, σ̄ = 2√τ and
// W = arctan(√a σ̄)/√a one gets ℓ = x²/(σ̄ W) + (n/2)(1 − W/σ̄).
fn sphere_ell(geom: &FlowGeometry, rho: f64, tau: f64) -> f64 {
    let n = geom.dimension() as f64;
    let a = 0.5 * (n - 1.0);
    let sigma = 2.0 * tau.sqrt();
    let w = (a.sqrt() * sigma).atan() / a.sqrt();
    let x = geom.comoving(rho, -tau);
    x * x / (sigma * w) + 0.5 * n * (1.0 - w / sigma)
}

#[test]
fn reduced_volume_of_the_flat_flow_is_one() {
    let f = ReducedDistanceField::new(FlowGeometry::gaussian_soliton(3));
    for tau in [0.05, 0.3, 2.0] {
        assert!((f.reduced_volume(tau).unwrap().value - 1.0).abs() < 1e-8);
    }
}

#[test]
fn sphere_reduced_volume_decreases_below_one() {
    let f = ReducedDistanceField::new(FlowGeometry::shrinking_sphere(3).unwrap());
    let values: Vec<f64> = [0.05, 0.15, 0.3].iter().map(|&t| f.reduced_volume(t).unwrap().value).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    assert!(values[0] < 1.0);
}

#[test]
fn memo_serves_repeated_queries() {
    let f = ReducedDistanceField::new(FlowGeometry::gaussian_soliton(3));
    let a = f.reduced_distance(0.7, 0.2).unwrap();
    let len = f.memo_len();
    assert_eq!(f.reduced_distance(0.7, 0.2).unwrap(), a);
    assert_eq!(f.memo_len(), len);
}

#[test]
fn invalid_times_are_rejected() {
    let f = ReducedDistanceField::new(FlowGeometry::gaussian_soliton(3));
    assert!(f.reduced_distance(0.5, 0.0).is_err());
    assert!(f.reduced_volume(-1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn flat_reduced_distance(rho in 0.0f64..2.5, tau in 0.02f64..1.5) {
        let f = ReducedDistanceField::new(FlowGeometry::gaussian_soliton(3));
        prop_assert!((f.reduced_distance(rho, tau).unwrap() - rho * rho / (4.0 * tau)).abs() < 1e-8);
    }

    #[test]
    fn sphere_reduced_distance(rho in 0.0f64..1.8, tau in 0.03f64..0.4) {
        let g = FlowGeometry::shrinking_sphere(3).unwrap();
        let f = ReducedDistanceField::new(g.clone());
        prop_assert!((f.reduced_distance(rho, tau).unwrap() - sphere_ell(&g, rho, tau)).abs() < 1e-8);
    }

    #[test]
    fn gauss_lemma_identities(rho in 0.1f64..1.5, tau in 0.05f64..0.4) {
        let f = ReducedDistanceField::new(FlowGeometry::shrinking_sphere(3).unwrap());
        let (grad, time) = f.gauss_identity_residuals(rho, tau, FD_STEP).unwrap();
        prop_assert!(grad < 1e-6 && time < 1e-6, "{grad:e} {time:e}");
    }

    #[test]
    fn jet_matches_the_sphere_oracle(rho in 0.2f64..1.2, tau in 0.05f64..0.3) {
        let g = FlowGeometry::shrinking_sphere(3).unwrap();
        let f = ReducedDistanceField::new(g.clone());
        let jet = f.jet(rho, tau, FD_STEP).unwrap();
        let h = 1e-5;
        let d_rho = (sphere_ell(&g, rho + h, tau) - sphere_ell(&g, rho - h, tau)) / (2.0 * h);
        prop_assert!((jet.ell_rho - d_rho).abs() < 1e-6);
    }
}
