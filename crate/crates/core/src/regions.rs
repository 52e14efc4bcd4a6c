//! Kernel super-level sets and the quadrature engines over them.
//!
//! Elliptic regions are geodesic balls `{G ≥ r^{-n}}` of radius `ρ*(r)`;
//! parabolic regions ("heat balls") are `{u(·, τ) ≥ r^{-n}}` for
//! `0 < τ ≤ τ_max(r)`, described by a radial profile `ρ(τ; r)`.

use crate::error::{range, unsupported, MvError, Result};
use crate::kernels::{Kernel, KernelSample};
use crate::numerics::{brent_with_values, cosine_map, Estimate, Integrator, Tolerance};

/// Profiles may reach at most this fraction of the largest available radius.
pub const COMPACTNESS_FRACTION: f64 = 0.9;
/// Number of cosine-spaced τ-samples used to inspect a profile.
pub const PROFILE_SAMPLES: usize = 64;

/// A quadrature node inside or on a region, with the kernel sampled there.
#[derive(Debug, Clone, Copy)]
pub struct RegionPoint {
    pub rho: f64,
    /// Backward time; zero for elliptic regions.
    pub tau: f64,
    pub kernel: KernelSample,
}

/// Tolerances for the outer (τ or ρ) and inner (ρ) quadratures.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSettings {
    pub outer: Tolerance,
    pub inner: Tolerance,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self { outer: Tolerance::new(1e-11, 1e-9), inner: Tolerance::new(1e-13, 1e-11) }
    }
}

impl QuadratureSettings {
    pub fn scaled(self, factor: f64) -> Self {
        Self { outer: self.outer.scaled(factor), inner: self.inner.scaled(factor) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Ball { rho_star: f64 },
    HeatBall { tau_max: f64 },
}

#[derive(Debug, Clone)]
pub struct LevelRegion {
    kernel: Kernel,
    r: f64,
    shape: Shape,
    compact: bool,
    settings: QuadratureSettings,
}

fn level(kernel: &Kernel, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return range(format!("level parameter must be positive, got {r}"));
    }
    Ok(-(kernel.dimension() as f64) * r.ln())
}

/// Bracketed root of a decreasing function `f` on `(0, limit)` with
/// `f(0⁺) > 0`, starting from `guess`.
fn decreasing_root<F>(mut f: F, guess: f64, limit: f64, what: &str) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut hi = guess.min(0.5 * limit).max(1e-300);
    let mut fhi = f(hi)?;
    let mut lo = hi;
    let mut flo = fhi;
    if fhi > 0.0 {
        loop {
            lo = hi;
            flo = fhi;
            if hi >= limit {
                return Err(MvError::NoRegion(format!("{what}: level not attained below {limit}")));
            }
            hi = if limit.is_finite() { (2.0 * hi).min(0.5 * (hi + limit)) } else { 2.0 * hi };
            if limit.is_finite() && hi >= limit * (1.0 - 1e-12) {
                return Err(MvError::NoRegion(format!("{what}: level not attained below {limit}")));
            }
            fhi = f(hi)?;
            if fhi <= 0.0 {
                break;
            }
        }
    } else {
        loop {
            if lo < 1e-300 {
                return Err(MvError::NoRegion(format!("{what}: level exceeded everywhere")));
            }
            hi = lo;
            fhi = flo;
            lo *= 0.5;
            flo = f(lo)?;
            if flo > 0.0 {
                break;
            }
        }
    }
    brent_with_values(f, lo, flo, hi, fhi, 1e-15 * hi.max(1e-300))
}

/// Radius `ρ*(r)` of the G-ball `{G ≥ r^{-n}}`.
pub fn level_radius(kernel: &Kernel, r: f64) -> Result<f64> {
    if kernel.kind().is_parabolic() {
        return unsupported("level_radius needs an elliptic kernel");
    }
    let target = level(kernel, r)?;
    let n = kernel.dimension() as f64;
    // Euclidean solution as the starting guess
    let guess = (r.powf(n) / ((n - 2.0).max(1.0) * crate::numerics::unit_sphere_area(kernel.dimension() - 1)))
        .powf(1.0 / (n - 2.0).max(1.0));
    let limit = kernel.geometry().rho_max(0.0);
    decreasing_root(|rho| Ok(kernel.value(rho, 0.0)?.ln() - target), guess, limit, "G-ball")
}

/// Heat ball `{u ≥ r^{-n}}` with its profile.
pub fn heatball_profile(kernel: &Kernel, r: f64) -> Result<LevelRegion> {
    LevelRegion::heat_ball(kernel.clone(), r)
}

impl LevelRegion {
    /// The region of the given kernel at level `r`, elliptic or parabolic.
    pub fn new(kernel: Kernel, r: f64) -> Result<Self> {
        if kernel.kind().is_parabolic() {
            Self::heat_ball(kernel, r)
        } else {
            Self::ball(kernel, r)
        }
    }

    pub fn ball(kernel: Kernel, r: f64) -> Result<Self> {
        let rho_star = level_radius(&kernel, r)?;
        let compact = rho_star <= COMPACTNESS_FRACTION * kernel.geometry().rho_max(0.0);
        if !compact {
            return Err(MvError::NoRegion(format!("G-ball of level {r} is not compact")));
        }
        Ok(Self { kernel, r, shape: Shape::Ball { rho_star }, compact, settings: QuadratureSettings::default() })
    }

    pub fn heat_ball(kernel: Kernel, r: f64) -> Result<Self> {
        if !kernel.kind().is_parabolic() {
            return unsupported("heat balls need a parabolic kernel");
        }
        let target = level(&kernel, r)?;
        let guess = r * r / (4.0 * std::f64::consts::PI);
        let tau_max = decreasing_root(|tau| Ok(kernel.value(0.0, tau)?.ln() - target), guess, f64::INFINITY, "heat ball")?;
        let mut region = Self {
            kernel,
            r,
            shape: Shape::HeatBall { tau_max },
            compact: false,
            settings: QuadratureSettings::default(),
        };
        let mut widest: f64 = 0.0;
        for (tau, rho) in region.profile_grid()? {
            let bound = COMPACTNESS_FRACTION * region.kernel.geometry().rho_max(-tau);
            if rho > bound {
                return Err(MvError::NoRegion(format!(
                    "heat ball of level {r} reaches rho = {rho} > {bound} at tau = {tau}"
                )));
            }
            widest = widest.max(rho);
        }
        region.compact = widest.is_finite();
        Ok(region)
    }

    pub fn with_settings(mut self, settings: QuadratureSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn settings(&self) -> QuadratureSettings {
        self.settings
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn rho_star(&self) -> Option<f64> {
        match self.shape {
            Shape::Ball { rho_star } => Some(rho_star),
            Shape::HeatBall { .. } => None,
        }
    }

    pub fn tau_max(&self) -> Option<f64> {
        match self.shape {
            Shape::HeatBall { tau_max } => Some(tau_max),
            Shape::Ball { .. } => None,
        }
    }

    /// Profile radius `ρ(τ; r)`; zero at and beyond `τ_max`.
    pub fn profile(&self, tau: f64) -> Result<f64> {
        let tau_max = self.tau_max().ok_or_else(|| MvError::Unsupported("elliptic regions have no profile".into()))?;
        if !(tau > 0.0) {
            return range(format!("tau must be positive, got {tau}"));
        }
        if tau >= tau_max {
            return Ok(0.0);
        }
        let target = level(&self.kernel, self.r)?;
        let geom = self.kernel.geometry();
        let n = self.kernel.dimension() as f64;
        let euclid = 2.0 * n * tau * (self.r * self.r / (4.0 * std::f64::consts::PI * tau)).ln();
        let guess = euclid.max(1e-8 * tau).sqrt();
        decreasing_root(
            |rho| Ok(self.kernel.value(rho, tau)?.ln() - target),
            guess,
            geom.rho_max(-tau),
            "heat-ball profile",
        )
    }

    /// Profile on a cosine-spaced τ-grid, refined towards both ends.
    pub fn profile_grid(&self) -> Result<Vec<(f64, f64)>> {
        let tau_max = self.tau_max().ok_or_else(|| MvError::Unsupported("elliptic regions have no profile".into()))?;
        (1..PROFILE_SAMPLES)
            .map(|i| {
                let tau = cosine_map(i as f64 / PROFILE_SAMPLES as f64, tau_max).0;
                Ok((tau, self.profile(tau)?))
            })
            .collect()
    }

    fn point(&self, rho: f64, tau: f64) -> Result<RegionPoint> {
        Ok(RegionPoint { rho, tau, kernel: self.kernel.sample(rho, tau)? })
    }

    fn area(&self, rho: f64, tau: f64) -> f64 {
        self.kernel.geometry().sphere_area_unchecked(rho, -tau)
    }

    /// `∫_{Ω_r} f dμ` (elliptic) or `∫_{E_r} f dμ dτ` (parabolic).
    pub fn ball_integrate<F>(&self, f: F) -> Result<Estimate>
    where
        F: Fn(&RegionPoint) -> Result<f64>,
    {
        self.shell_integrate(None, f)
    }

    /// Integral over `E_r ∖ E_a` (or `Ω_r ∖ Ω_a`) for an inner region `a`
    /// of the same kernel.
    pub fn annulus_integrate<F>(&self, inner: &LevelRegion, f: F) -> Result<Estimate>
    where
        F: Fn(&RegionPoint) -> Result<f64>,
    {
        if inner.r > self.r {
            return range(format!("inner level {} exceeds outer level {}", inner.r, self.r));
        }
        self.shell_integrate(Some(inner), f)
    }

    fn shell_integrate<F>(&self, inner: Option<&LevelRegion>, f: F) -> Result<Estimate>
    where
        F: Fn(&RegionPoint) -> Result<f64>,
    {
        let outer_q = Integrator::new(self.settings.outer);
        let inner_q = Integrator::new(self.settings.inner);
        match self.shape {
            Shape::Ball { rho_star } => {
                let start = inner.and_then(|a| a.rho_star()).unwrap_or(0.0);
                outer_q.integrate(
                    |s| {
                        let (rho, drho) = cosine_map(s, rho_star - start);
                        let rho = start + rho;
                        if rho <= 0.0 {
                            return Ok(0.0);
                        }
                        Ok(f(&self.point(rho, 0.0)?)? * self.area(rho, 0.0) * drho)
                    },
                    0.0,
                    1.0,
                )
            }
            Shape::HeatBall { tau_max } => {
                let slice = |tau: f64| -> Result<f64> {
                    let hi = self.profile(tau)?;
                    let lo = match inner {
                        Some(a) => a.profile(tau)?,
                        None => 0.0,
                    };
                    if hi <= lo {
                        return Ok(0.0);
                    }
                    let est = inner_q.integrate(
                        |rho| {
                            if rho <= 0.0 {
                                return Ok(0.0);
                            }
                            Ok(f(&self.point(rho, tau)?)? * self.area(rho, tau))
                        },
                        lo,
                        hi,
                    )?;
                    Ok(est.value)
                };
                let split = inner.and_then(|a| a.tau_max()).filter(|&t| t > 0.0 && t < tau_max);
                let mut pieces = vec![(0.0, split.unwrap_or(tau_max))];
                if let Some(t) = split {
                    pieces.push((t, tau_max));
                }
                let mut total = Estimate::new(0.0, 0.0);
                for (a, b) in pieces {
                    total = total
                        + outer_q.integrate(
                            |s| {
                                let (tau, dtau) = cosine_map(s, b - a);
                                let tau = a + tau;
                                if tau <= 0.0 || dtau == 0.0 {
                                    return Ok(0.0);
                                }
                                Ok(slice(tau)? * dtau)
                            },
                            0.0,
                            1.0,
                        )?;
                }
                Ok(total)
            }
        }
    }

    /// `∫_{Ψ_r} f dA` (elliptic) or `∫_{∂E_r} f dÃ` (parabolic). On a heat
    /// sphere `dÃ = √(1 + c x'(τ)²) dA dτ`, which on the level set equals
    /// `√(|∇u|² + u_τ²) / |∇u| · dA dτ`.
    pub fn sphere_integrate<F>(&self, f: F) -> Result<Estimate>
    where
        F: Fn(&RegionPoint) -> Result<f64>,
    {
        match self.shape {
            Shape::Ball { rho_star } => Ok(Estimate::exact(f(&self.point(rho_star, 0.0)?)? * self.area(rho_star, 0.0))),
            Shape::HeatBall { tau_max } => Integrator::new(self.settings.outer).integrate(
                |s| {
                    let (tau, dtau) = cosine_map(s, tau_max);
                    if tau <= 0.0 || tau >= tau_max || dtau == 0.0 {
                        return Ok(0.0);
                    }
                    let rho = self.profile(tau)?;
                    if rho <= 0.0 {
                        return Ok(0.0);
                    }
                    let p = self.point(rho, tau)?;
                    let k = p.kernel;
                    let stretch = k.d_rho.hypot(k.d_tau) / k.d_rho.abs();
                    Ok(f(&p)? * stretch * self.area(rho, tau) * dtau)
                },
                0.0,
                1.0,
            ),
        }
    }

    /// Surface integrand of the "J" family, `|∇u|² / √(|∇u|² + u_τ²)`
    /// multiplied by `dÃ`, reduces to `|∇u| dA dτ`; exposed as a helper.
    pub fn flux_weight(p: &RegionPoint) -> f64 {
        let k = p.kernel;
        k.d_rho * k.d_rho / k.d_rho.hypot(k.d_tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FlowGeometry;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_ball_radius() {
        let g = Kernel::exact_green(FlowGeometry::euclidean(3)).unwrap();
        assert!((level_radius(&g, 1.0).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-14);
        assert!((level_radius(&g, 2.0).unwrap() - 2.0 / PI).abs() < 1e-13);
        assert!(level_radius(&g, 0.0).is_err());
    }

    #[test]
    fn sub_green_ball_is_smaller() {
        let h = FlowGeometry::hyperbolic(3, 1.0).unwrap();
        let g = Kernel::sub_green(h, 1.0).unwrap();
        let rho = level_radius(&g, 1.0).unwrap();
        assert!(rho > 0.0 && rho <= 1.0 / (4.0 * PI));
    }

    #[test]
    fn euclidean_heat_ball() {
        let h = Kernel::heat(FlowGeometry::euclidean(2)).unwrap();
        let e = heatball_profile(&h, 1.0).unwrap();
        assert!((e.tau_max().unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-14);
        let rho = e.profile(1.0 / (8.0 * PI)).unwrap();
        assert!((rho - (2f64.ln() / (2.0 * PI)).sqrt()).abs() < 1e-12);
        for n in [1usize, 2, 3] {
            let h = Kernel::heat(FlowGeometry::euclidean(n)).unwrap();
            let e = heatball_profile(&h, 0.7).unwrap();
            for (tau, rho) in e.profile_grid().unwrap() {
                let exact = (2.0 * n as f64 * tau * (0.49 / (4.0 * PI * tau)).ln()).sqrt();
                assert!((rho - exact).abs() <= 1e-10, "n={n} tau={tau}");
            }
        }
    }

    #[test]
    fn heat_ball_weight_and_green_flux() {
        let h = Kernel::heat(FlowGeometry::euclidean(2)).unwrap();
        let e = heatball_profile(&h, 1.0).unwrap();
        let w = e.ball_integrate(|p| Ok(p.rho * p.rho / (4.0 * p.tau * p.tau))).unwrap();
        assert!((w.value - 1.0).abs() < 1e-6, "{w:?}");
        let g = Kernel::exact_green(FlowGeometry::euclidean(3)).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let b = LevelRegion::ball(g.clone(), r).unwrap();
            let flux = b.sphere_integrate(|p| Ok(-p.kernel.d_rho)).unwrap();
            assert!((flux.value - 1.0).abs() < 1e-12);
            let energy = b.ball_integrate(|p| Ok((p.kernel.d_rho / p.kernel.value).powi(2))).unwrap();
            assert!((energy.value - r.powi(3)).abs() < 1e-8 * r.powi(3));
        }
        let b = LevelRegion::ball(g, 1.0).unwrap();
        let vol = b.ball_integrate(|_| Ok(1.0)).unwrap();
        assert!((vol.value - 4.0 / 3.0 * PI * (1.0 / (4.0 * PI)).powi(3)).abs() < 1e-15);
    }

    #[test]
    fn heat_sphere_weight_is_one() {
        let h = Kernel::heat(FlowGeometry::euclidean(2)).unwrap();
        let e = heatball_profile(&h, 1.0).unwrap();
        let j = e.sphere_integrate(|p| Ok(LevelRegion::flux_weight(p))).unwrap();
        assert!((j.value - 1.0).abs() < 1e-8, "{j:?}");
    }

    #[test]
    fn nesting() {
        let h = Kernel::heat(FlowGeometry::hyperbolic(3, 1.0).unwrap()).unwrap();
        let a = heatball_profile(&h, 0.5).unwrap();
        let r = heatball_profile(&h, 0.8).unwrap();
        assert!(a.tau_max().unwrap() < r.tau_max().unwrap());
        for (tau, rho) in a.profile_grid().unwrap() {
            assert!(rho <= r.profile(tau).unwrap());
        }
    }
}
