//! Mean curvature flow quantities on the homothetically shrinking round
//! sphere `M_τ = S^n(√(2nτ)) ⊂ ℝ^{n+1}`, which becomes extinct at the origin
//! at `τ = 0`.
//!
//! Points of the track are `y = R(τ)(cos θ, sin θ, 0, …)`; every integrand
//! used here is symmetric about the first axis, so slice integrals reduce to
//! the polar angle `θ ∈ [0, π]`.

use rayon::prelude::*;

use crate::error::{range, Result};
use crate::kernels::mcf_sup_heat_kernel;
use crate::numerics::{brent, cosine_map, unit_sphere_area, Estimate, Integrator, Tolerance};
use crate::sweep::{Direction, SweepReport};

/// The shrinking `n`-sphere with the sup-heat kernel `K̄` centered at
/// `(x₀, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkingSphereMcf {
    n: usize,
    center: Vec<f64>,
}

/// Kernel data at a point of the track, with derivatives along the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSample {
    pub value: f64,
    /// `|∇ log K̄|²` with the intrinsic gradient.
    pub grad_log_sq: f64,
    /// `(log K̄)_τ` following the moving point, `dy/dτ = −H⃗`.
    pub dlog_tau: f64,
    /// `⟨H⃗, ∇^⊥ log K̄⟩`.
    pub h_dot_normal: f64,
    /// `|∇^⊥ log K̄|²`.
    pub normal_sq: f64,
}

impl TrackSample {
    /// Harnack expression `|∇ log K̄|² − (log K̄)_τ`.
    pub fn harnack_q(&self) -> f64 {
        self.grad_log_sq - self.dlog_tau
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ShrinkingSphereMcf {
    /// Centered at the extinction point.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_center(n, vec![0.0; n + 1])
    }

    pub fn with_center(n: usize, center: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return range("the shrinking sphere needs n >= 1");
        }
        if center.len() != n + 1 {
            return range(format!("center must live in R^{}, got {} coordinates", n + 1, center.len()));
        }
        Ok(Self { n, center })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn radius(&self, tau: f64) -> f64 {
        (2.0 * self.n as f64 * tau).sqrt()
    }

    /// Point of `M_τ` at polar angle `θ`.
    pub fn point(&self, theta: f64, tau: f64) -> Vec<f64> {
        let mut y = vec![0.0; self.n + 1];
        let r = self.radius(tau);
        y[0] = r * theta.cos();
        y[1] = r * theta.sin();
        y
    }

    /// Mean curvature vector `−y/(2τ)` of `M_τ`.
    pub fn mean_curvature(&self, y: &[f64], tau: f64) -> Vec<f64> {
        y.iter().map(|c| -c / (2.0 * tau)).collect()
    }

    pub fn sample(&self, theta: f64, tau: f64) -> Result<TrackSample> {
        let y = self.point(theta, tau);
        let value = mcf_sup_heat_kernel(&self.center, &y, tau, self.n)?;
        let z: Vec<f64> = y.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let normal_dir: Vec<f64> = {
            let r = self.radius(tau);
            y.iter().map(|c| c / r).collect()
        };
        let zn = dot(&z, &normal_dir);
        let z_sq = dot(&z, &z);
        let z_normal_sq = zn * zn;
        let z_tangent_sq = z_sq - z_normal_sq;
        let h = self.mean_curvature(&y, tau);
        // ambient gradient of log K̄ is −z/(2τ)
        let grad_log_sq = z_tangent_sq / (4.0 * tau * tau);
        let normal_sq = z_normal_sq / (4.0 * tau * tau);
        let h_dot_normal = -dot(&h, &normal_dir) * zn / (2.0 * tau);
        let n = self.n as f64;
        let dlog_tau = -n / (2.0 * tau) + z_sq / (4.0 * tau * tau) + dot(&z, &h) / (2.0 * tau);
        Ok(TrackSample { value, grad_log_sq, dlog_tau, h_dot_normal, normal_sq })
    }

    /// `∫_{M_τ} f dμ` for integrands symmetric about the first axis.
    fn slice_integrate<F>(&self, tau: f64, tol: Tolerance, f: F) -> Result<Estimate>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let r = self.radius(tau);
        let weight = unit_sphere_area(self.n - 1) * r.powi(self.n as i32);
        let est = Integrator::new(tol).integrate(|theta| Ok(f(theta)? * theta.sin().powi(self.n as i32 - 1)), 0.0, std::f64::consts::PI)?;
        Ok(est.scale(weight))
    }

    /// Gaussian density `Θ = ∫_{M_1} K̄(·, 1) dμ` by quadrature.
    pub fn gaussian_density(&self) -> Result<Estimate> {
        self.slice_integrate(1.0, Tolerance::new(1e-14, 1e-13), |theta| Ok(mcf_sup_heat_kernel(&self.center, &self.point(theta, 1.0), 1.0, self.n)?))
    }

    /// Backward time `τ_r` of the heat sphere `{K̄ = r^{-n}}`, which on the
    /// centered track is a single time slice.
    pub fn level_time(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return range(format!("level parameter must be positive, got {r}"));
        }
        let target = -(self.n as f64) * r.ln();
        let g = |tau: f64| Ok(mcf_sup_heat_kernel(&self.center, &self.point(0.0, tau), tau, self.n)?.ln() - target);
        let guess = r * r / (4.0 * std::f64::consts::PI);
        brent(g, guess * 1e-3, guess * 1e3, 1e-15 * guess)
    }

    /// `J̄(r) = ∫_{∂Ē_r} (|∇K̄|² − K̄ K̄_τ)/√(|∇K̄|² + K̄_τ²) dÃ`. The heat sphere
    /// is the slice `τ = τ_r`, on which `dÃ = dμ`.
    pub fn jbar(&self, r: f64) -> Result<Estimate> {
        let tau = self.level_time(r)?;
        self.slice_integrate(tau, Tolerance::new(1e-14, 1e-12), |theta| {
            let s = self.sample(theta, tau)?;
            let (grad_sq, k_tau) = (s.grad_log_sq * s.value * s.value, s.dlog_tau * s.value);
            Ok((grad_sq - s.value * k_tau) / (grad_sq + k_tau * k_tau).sqrt())
        })
    }

    /// `Ī(a, r) = (rⁿ − aⁿ)^{-1} ∫_{Ē_r ∖ Ē_a} Q(K̄) dμ dτ`.
    pub fn ibar(&self, a: f64, r: f64) -> Result<Estimate> {
        if !(a >= 0.0 && a < r) {
            return range(format!("need 0 <= a < r, got a = {a}, r = {r}"));
        }
        let t_r = self.level_time(r)?;
        let t_a = if a == 0.0 { 0.0 } else { self.level_time(a)? };
        let inner = Tolerance::new(1e-14, 1e-12);
        let est = Integrator::new(Tolerance::new(1e-12, 1e-10)).integrate(
            |s| {
                let (dt, w) = cosine_map(s, t_r - t_a);
                let tau = t_a + dt;
                if tau <= 0.0 || w == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.slice_integrate(tau, inner, |theta| Ok(self.sample(theta, tau)?.harnack_q()))?.value * w)
            },
            0.0,
            1.0,
        )?;
        let n = self.n as i32;
        Ok(est.scale(1.0 / (r.powi(n) - a.powi(n))))
    }

    /// `|Q(K̄) − n/(2τ) − ⟨H⃗, ∇^⊥ log K̄⟩ + |∇^⊥ log K̄|²|` at `(θ, τ)` samples.
    pub fn harnack_residuals(&self, samples: &[(f64, f64)]) -> Result<Vec<f64>> {
        let n = self.n as f64;
        samples
            .iter()
            .map(|&(theta, tau)| {
                let s = self.sample(theta, tau)?;
                Ok((s.harnack_q() - n / (2.0 * tau) - s.h_dot_normal + s.normal_sq).abs())
            })
            .collect()
    }
}

/// `A_n (n/2π)^{n/2} e^{-n/2}`, the Gaussian density of the round shrinker.
pub fn gaussian_density_closed_form(n: usize) -> f64 {
    let nf = n as f64;
    unit_sphere_area(n) * (nf / (2.0 * std::f64::consts::PI)).powf(0.5 * nf) * (-0.5 * nf).exp()
}

/// `J̄(r)` and `Ī(a, r)` over an increasing grid, both asserted non-decreasing.
pub fn mcf_sweep(flow: &ShrinkingSphereMcf, grid: &[f64], a: f64, tol: f64) -> Result<(SweepReport, SweepReport)> {
    let rows: Vec<Result<(Estimate, Estimate)>> = grid.par_iter().map(|&r| Ok((flow.jbar(r)?, flow.ibar(a, r)?))).collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let j: Vec<Estimate> = rows.iter().map(|r| r.0).collect();
    let i: Vec<Estimate> = rows.iter().map(|r| r.1).collect();
    Ok((
        SweepReport::new("jbar", Direction::NonDecreasing, grid.to_vec(), &j, tol)?,
        SweepReport::new("ibar", Direction::NonDecreasing, grid.to_vec(), &i, tol)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_density() {
        let c = ShrinkingSphereMcf::new(1).unwrap();
        let theta = c.gaussian_density().unwrap().value;
        assert!((theta - (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt()).abs() < 1e-12);
        assert!((gaussian_density_closed_form(2) - 4.0 / std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn level_time_closed_form() {
        let c = ShrinkingSphereMcf::new(2).unwrap();
        let r = 0.7;
        let exact = r * r / (4.0 * std::f64::consts::PI * std::f64::consts::E);
        assert!((c.level_time(r).unwrap() - exact).abs() < 1e-14);
    }

    #[test]
    fn off_center_harnack_decomposition() {
        let c = ShrinkingSphereMcf::with_center(1, vec![0.3, -0.2]).unwrap();
        let res = c.harnack_residuals(&[(0.4, 0.1), (2.0, 0.5), (3.0, 0.05)]).unwrap();
        assert!(res.iter().all(|&r| r <= 1e-8), "{res:?}");
        assert!(ShrinkingSphereMcf::with_center(1, vec![0.0]).is_err());
    }
}
