use std::f64::consts::{E, PI};

use mvlab::mcf::{gaussian_density_closed_form, mcf_sweep, ShrinkingSphereMcf};
use proptest::prelude::*;

#[test]
fn density_quadrature_matches_closed_form() {
    for n in 1..=4 {
        let theta = ShrinkingSphereMcf::new(n).unwrap().gaussian_density().unwrap().value;
        assert!((theta - gaussian_density_closed_form(n)).abs() < 1e-12, "n = {n}");
    }
    // [PAPER] the circle has density √(2π/e) ≈ 1.52035.
    assert!((gaussian_density_closed_form(1) - 1.52035).abs() < 1e-5);
    assert!((gaussian_density_closed_form(1) - (2.0 * PI / E).sqrt()).abs() < 1e-15);
}

#[test]
fn quantities_are_constant_on_the_self_similar_flow() {
    let flow = ShrinkingSphereMcf::new(2).unwrap();
    let theta = gaussian_density_closed_form(2);
    let (j, i) = mcf_sweep(&flow, &[0.3, 0.6, 0.9], 0.2, 1e-8).unwrap();
    assert!(j.monotone() && i.monotone());
    assert!(j.max_deviation_from(theta) < 1e-8);
    assert!(i.max_deviation_from(theta) < 1e-7);
}

#[test]
fn invalid_arguments() {
    let flow = ShrinkingSphereMcf::new(1).unwrap();
    assert!(flow.ibar(0.5, 0.4).is_err());
    assert!(flow.level_time(0.0).is_err());
    assert!(ShrinkingSphereMcf::new(0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn level_time_closed_form(n in 1usize..4, r in 0.05f64..3.0) {
        // [DERIVED] (4πτ)^{-n/2} e^{-n/2} = r^{-n} at τ = r²/(4πe).
        let t = ShrinkingSphereMcf::new(n).unwrap().level_time(r).unwrap();
        prop_assert!((t / (r * r / (4.0 * PI * E)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jbar_equals_density(n in 1usize..3, r in 0.1f64..1.5) {
        let flow = ShrinkingSphereMcf::new(n).unwrap();
        prop_assert!((flow.jbar(r).unwrap().value - gaussian_density_closed_form(n)).abs() < 1e-9);
    }

    #[test]
    fn harnack_decomposition_off_center(cx in -0.5f64..0.5, cy in -0.5f64..0.5, theta in 0.0f64..6.28, tau in 0.02f64..2.0) {
        let flow = ShrinkingSphereMcf::with_center(1, vec![cx, cy]).unwrap();
        let res = flow.harnack_residuals(&[(theta, tau)]).unwrap()[0];
        let scale = 1.0 + 1.0 / (tau * tau);
        prop_assert!(res <= 1e-12 * scale, "{res:e}");
    }
}
