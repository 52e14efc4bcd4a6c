//! Numerical building blocks: quadrature, ODE integration, root finding and
//! finite differences.

pub mod ode;
pub mod quadrature;
pub mod roots;

pub use ode::{dopri5, OdeOptions, Trajectory};
pub use quadrature::{cosine_map, gauss_legendre, Estimate, Integrator, Tolerance};
pub use roots::{brent, brent_with_values, expand_bracket};

/// Default finite-difference step for unit-scale quantities.
pub const FD_STEP: f64 = 1e-4;

/// Central first difference.
pub fn central_diff<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Area of the unit `m`-sphere in `R^{m+1}`.
pub fn unit_sphere_area(m: usize) -> f64 {
    use std::f64::consts::PI;
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * unit_sphere_area(m - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }
}
