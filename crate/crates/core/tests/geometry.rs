use mvlab::geometry::{FlowGeometry, ProbeField, SpaceTimePoint};
use proptest::prelude::*;

fn models() -> Vec<FlowGeometry> {
    vec![
        FlowGeometry::euclidean(2),
        FlowGeometry::euclidean(3),
        FlowGeometry::hyperbolic(3, 1.0).unwrap(),
        FlowGeometry::hyperbolic(2, 0.5).unwrap(),
        FlowGeometry::shrinking_sphere(2).unwrap(),
        FlowGeometry::shrinking_sphere(3).unwrap(),
        FlowGeometry::gaussian_soliton(3),
    ]
}

#[test]
fn shrinking_sphere_scale_and_curvature() {
    // [DERIVED] c(t) = 1 − 2(n−1)t and Ric = (n−1)/c · g on the unit-sphere model.
    let g = FlowGeometry::shrinking_sphere(3).unwrap();
    assert!((g.scale_sq(-0.5) - 3.0).abs() < 1e-15);
    let (radial, tangential) = g.ricci(0.4, -0.5);
    assert!((radial - 2.0 / 3.0).abs() < 1e-12 && (tangential - 2.0 / 3.0).abs() < 1e-12);
    assert!((g.r_trace(0.4, -0.5) - 2.0).abs() < 1e-12);
}

#[test]
fn hyperbolic_sphere_area() {
    // [DERIVED] |∂B_ρ| = 4π sinh²ρ on H³.
    let g = FlowGeometry::hyperbolic(3, 1.0).unwrap();
    let area = g.sphere_area(0.9, 0.0).unwrap();
    assert!((area - 4.0 * std::f64::consts::PI * 0.9f64.sinh().powi(2)).abs() < 1e-12);
}

#[test]
fn points_outside_the_model_are_rejected() {
    let g = FlowGeometry::shrinking_sphere(3).unwrap();
    assert!(g.check_point(0.5, 0.6).is_err());
    assert!(FlowGeometry::hyperbolic(3, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn connection_and_divergence_match_finite_differences(
        model in 0usize..7,
        rho in 0.05f64..1.4,
        t in -0.4f64..0.05,
        dir in proptest::collection::vec(-1.0f64..1.0, 3),
    ) {
        let g = &models()[model];
        let n = g.dimension();
        prop_assume!(dir[..n].iter().map(|x| x * x).sum::<f64>() > 1e-2);
        let p = SpaceTimePoint::with_direction(rho, dir[..n].to_vec(), t);
        let c = g.spacetime_christoffels(&p).unwrap().max_abs_diff(&g.spacetime_christoffels_fd(&p, 1e-4).unwrap());
        prop_assert!(c < 1e-6, "christoffel residual {c:e}");
        let d = (g.spacetime_divergence(&ProbeField, &p).unwrap() - g.spacetime_divergence_fd(&ProbeField, &p, 1e-4).unwrap()).abs();
        prop_assert!(d < 1e-6, "divergence residual {d:e}");
    }
}
