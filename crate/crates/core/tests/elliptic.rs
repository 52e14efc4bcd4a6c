use std::f64::consts::PI;

use mvlab::elliptic::{self, MvForm, Relation};
use mvlab::fields::{make_field, FieldName};
use mvlab::geometry::FlowGeometry;
use mvlab::kernels::Kernel;
use mvlab::sweep::Direction;
use mvlab::MvError;
use proptest::prelude::*;

fn e3() -> FlowGeometry {
    FlowGeometry::euclidean(3)
}

fn h3() -> FlowGeometry {
    FlowGeometry::hyperbolic(3, 1.0).unwrap()
}

// [DERIVED] In R^3 the G-ball {1/(4πd) ≥ r^{-3}} has radius R = r³/(4π).
// For v = 10 − |y|², J = 10 − R² and I = 4π r^{-3} (10R − R³/3).
fn superharmonic_oracles(r: f64) -> (f64, f64) {
    let big_r = r.powi(3) / (4.0 * PI);
    let j = 10.0 - big_r * big_r;
    let i = 4.0 * PI * r.powi(-3) * (10.0 * big_r - big_r.powi(3) / 3.0);
    (j, i)
}

#[test]
fn superharmonic_j_and_i_match_closed_forms() {
    let g = Kernel::exact_green(e3()).unwrap();
    let v = make_field(FieldName::Superharmonic, &e3()).unwrap();
    for r in [0.4, 1.0, 1.7] {
        let (j, i) = superharmonic_oracles(r);
        assert!((elliptic::j_v(&g, &v, r).unwrap().value - j).abs() < 1e-10, "J at r = {r}");
        assert!((elliptic::i_v(&g, &v, r).unwrap().value - i).abs() < 1e-9, "I at r = {r}");
    }
}

#[test]
fn derivative_of_j_at_unit_level() {
    // [DERIVED] d/dr (10 − r⁶/(16π²)) = −3/(8π²) at r = 1.
    let g = Kernel::exact_green(e3()).unwrap();
    let v = make_field(FieldName::Superharmonic, &e3()).unwrap();
    let h = 1e-4;
    let d = (elliptic::j_v(&g, &v, 1.0 + h).unwrap().value - elliptic::j_v(&g, &v, 1.0 - h).unwrap().value) / (2.0 * h);
    assert!((d + 3.0 / (8.0 * PI * PI)).abs() < 1e-7);
}

#[test]
fn superharmonic_sweep_is_non_increasing_with_exact_derivatives() {
    let g = Kernel::exact_green(e3()).unwrap();
    let v = make_field(FieldName::Superharmonic, &e3()).unwrap();
    let sw = elliptic::elliptic_sweep(&g, &v, &[0.5, 0.8, 1.1, 1.4], Direction::NonIncreasing, 1e-6).unwrap();
    assert!(sw.i.monotone() && sw.j.monotone());
    for d in sw.j_derivative.iter().chain(&sw.i_derivative) {
        assert_eq!(d.relation, Relation::Equal);
        assert!(d.holds, "{d:?}");
    }
    assert!(sw.relation_residual < 1e-6);
}

#[test]
fn hyperbolic_equality_and_comparison_kernels() {
    let v = make_field(FieldName::ExpRadial, &h3()).unwrap();
    let exact = Kernel::exact_green(h3()).unwrap();
    for form in [MvForm::Sphere, MvForm::Ball] {
        assert!(elliptic::mv_identity(&exact, &v, 0.8, form).unwrap().residual < 1e-8);
    }
    // Stronger comparison curvature gives a strictly smaller mean.
    let loose = Kernel::sub_green(h3(), 3.0).unwrap();
    let deficit = elliptic::mv_inequality_deficit(&loose, &v, 0.8, MvForm::Sphere).unwrap().value;
    assert!(deficit > 1e-4);
}

#[test]
fn comparison_kernels_reject_identities_and_negative_fields() {
    let sup = Kernel::sup_green(h3()).unwrap();
    let one = make_field(FieldName::Constant, &h3()).unwrap();
    assert!(elliptic::mv_identity(&sup, &one, 1.0, MvForm::Sphere).is_err());
    let lin = make_field(FieldName::Linear, &e3()).unwrap();
    let g = Kernel::exact_green(e3()).unwrap();
    assert!(matches!(elliptic::mv_inequality_deficit(&g, &lin, 1.0, MvForm::Ball), Err(MvError::Precondition(_))));
}

#[test]
fn non_parabolicity_by_model() {
    assert!(elliptic::is_strongly_non_parabolic(&e3()));
    assert!(elliptic::is_strongly_non_parabolic(&h3()));
    assert!(!elliptic::is_strongly_non_parabolic(&FlowGeometry::euclidean(2)));
    assert!(Kernel::exact_green(FlowGeometry::euclidean(2)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unit_flux_and_harmonic_means(r in 0.1f64..2.5) {
        let g = Kernel::exact_green(e3()).unwrap();
        let one = make_field(FieldName::Constant, &e3()).unwrap();
        let hq = make_field(FieldName::HarmonicQuadratic, &e3()).unwrap();
        prop_assert!((elliptic::j_v(&g, &one, r).unwrap().value - 1.0).abs() < 1e-9);
        prop_assert!(elliptic::j_v(&g, &hq, r).unwrap().value.abs() < 1e-9);
        prop_assert!((elliptic::i_v(&g, &one, r).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn j_is_linear_in_the_field(r in 0.2f64..1.5) {
        let g = Kernel::exact_green(e3()).unwrap();
        let one = make_field(FieldName::Constant, &e3()).unwrap();
        let sup = make_field(FieldName::Superharmonic, &e3()).unwrap();
        let sub = make_field(FieldName::Subharmonic, &e3()).unwrap();
        // [DERIVED] subharmonic is |y|², so superharmonic + subharmonic = 10.
        let total = elliptic::j_v(&g, &sup, r).unwrap().value + elliptic::j_v(&g, &sub, r).unwrap().value;
        prop_assert!((total - 10.0 * elliptic::j_v(&g, &one, r).unwrap().value).abs() < 1e-9);
    }

    #[test]
    fn sub_green_deficit_is_non_negative(r in 0.3f64..1.5, k in 1.0f64..3.0) {
        let v = make_field(FieldName::ExpRadial, &h3()).unwrap();
        let kernel = Kernel::sub_green(h3(), k).unwrap();
        prop_assert!(elliptic::mv_inequality_deficit(&kernel, &v, r, MvForm::Sphere).unwrap().value >= -1e-7);
    }
}
