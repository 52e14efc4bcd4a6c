//! Parabolic mean-value identities on heat balls, the Ricci-flow quantities
//! `Ĵ(r)` and `Î(a, r)`, their surface rewrites, and the pointwise identities
//! satisfied by the reduced distance on solitons.
//!
//! Kernels are centered at the pole at `t = 0`; points of a heat ball are
//! addressed by `(ρ, τ)` with `t = −τ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::IdentityCheck;
use crate::error::{unsupported, MvError, Result};
use crate::fields::{Classification, FieldName, MeanOf, TestField};
use crate::kernels::{Kernel, KernelKind};
use crate::numerics::{Estimate, Integrator, Tolerance, FD_STEP};
use crate::reduced::ReducedDistanceField;
use crate::regions::{LevelRegion, QuadratureSettings, RegionPoint};
use crate::sweep::{Direction, SweepReport};

/// Tolerances used on regions of the sub-heat kernel, whose derivatives
/// carry finite-difference noise well above the exact-kernel defaults.
pub fn sub_heat_settings() -> QuadratureSettings {
    QuadratureSettings { outer: Tolerance::new(1e-9, 1e-7), inner: Tolerance::new(1e-10, 1e-8) }
}

fn heat_ball(kernel: &Kernel, r: f64) -> Result<LevelRegion> {
    if !kernel.kind().is_parabolic() {
        return unsupported("parabolic formulas need a parabolic kernel");
    }
    let region = LevelRegion::heat_ball(kernel.clone(), r)?;
    Ok(match kernel.kind() {
        KernelKind::SubHeat => region.with_settings(sub_heat_settings()),
        _ => region,
    })
}

fn value_at(v: &TestField, p: &RegionPoint) -> f64 {
    v.spherical_mean(MeanOf::Value, p.rho, -p.tau)
}

fn scalar_curvature(kernel: &Kernel, p: &RegionPoint) -> f64 {
    kernel.geometry().r_trace(p.rho, -p.tau)
}

fn has_curvature_term(kernel: &Kernel) -> bool {
    kernel.geometry().is_ricci_flow() && !kernel.geometry().is_flat()
}

fn level_power(kernel: &Kernel, r: f64) -> f64 {
    r.powi(kernel.dimension() as i32)
}

/// `J_v(r) = ∫_{∂E_r} v |∇u|²/√(|∇u|²+u_τ²) dÃ + r^{-n} ∫_{E_r} R v`.
pub fn j_v(kernel: &Kernel, v: &TestField, r: f64) -> Result<Estimate> {
    let region = heat_ball(kernel, r)?;
    let surface = region.sphere_integrate(|p| Ok(LevelRegion::flux_weight(p) * value_at(v, p)))?;
    if !has_curvature_term(kernel) {
        return Ok(surface);
    }
    let volume = region.ball_integrate(|p| Ok(scalar_curvature(kernel, p) * value_at(v, p)))?;
    Ok(surface + volume.scale(1.0 / level_power(kernel, r)))
}

/// `I_v(r) = r^{-n} ∫_{E_r} (|∇ log u|² + R ψ_r) v`, `ψ_r = log(u rⁿ)`.
pub fn i_v(kernel: &Kernel, v: &TestField, r: f64) -> Result<Estimate> {
    let rn = level_power(kernel, r);
    let curved = has_curvature_term(kernel);
    let est = heat_ball(kernel, r)?.ball_integrate(|p| {
        let k = p.kernel;
        let mut w = (k.d_rho / k.value).powi(2);
        if curved {
            w += scalar_curvature(kernel, p) * (k.value * rn).ln();
        }
        Ok(w * value_at(v, p))
    })?;
    Ok(est.scale(1.0 / rn))
}

/// `∫_{E_r} w (∂t − Δ) v`; exactly zero for caloric fields.
fn source_integral<W>(kernel: &Kernel, v: &TestField, r: f64, weight: W) -> Result<Estimate>
where
    W: Fn(&RegionPoint) -> f64,
{
    if v.classification() == Classification::Caloric {
        return Ok(Estimate::exact(0.0));
    }
    heat_ball(kernel, r)?.ball_integrate(|p| Ok(weight(p) * v.heat_operator_mean(p.rho, -p.tau)))
}

fn require_exact_heat(kernel: &Kernel) -> Result<()> {
    if kernel.kind() != KernelKind::Heat {
        return unsupported("heat-sphere identities need the exact heat kernel");
    }
    Ok(())
}

/// Spherical mean-value identity on the heat sphere `∂E_r`:
/// `v(x₀, 0) = J_v(r) + ∫_{E_r} φ_r (∂t − Δ) v`.
pub fn mv_heat_sphere(kernel: &Kernel, v: &TestField, r: f64) -> Result<IdentityCheck> {
    require_exact_heat(kernel)?;
    let level = 1.0 / level_power(kernel, r);
    let correction = source_integral(kernel, v, r, |p| p.kernel.value - level)?;
    let rhs = j_v(kernel, v, r)? + correction;
    let lhs = v.spherical_mean(MeanOf::Value, 0.0, 0.0);
    Ok(IdentityCheck { lhs, rhs, residual: (lhs - rhs.value).abs() })
}

/// Heat-ball mean-value identity. The iterated correction
/// `(n/rⁿ) ∫₀^r η^{n-1} ∫_{E_η} φ_η f dη` is evaluated through its
/// single-integral form `∫_{E_r} (φ_r − r^{-n} ψ_r) f`.
pub fn mv_heat_ball(kernel: &Kernel, v: &TestField, r: f64) -> Result<IdentityCheck> {
    require_exact_heat(kernel)?;
    let rn = level_power(kernel, r);
    let correction = source_integral(kernel, v, r, |p| {
        let u = p.kernel.value;
        u - 1.0 / rn - (u * rn).ln() / rn
    })?;
    let rhs = i_v(kernel, v, r)? + correction;
    let lhs = v.spherical_mean(MeanOf::Value, 0.0, 0.0);
    Ok(IdentityCheck { lhs, rhs, residual: (lhs - rhs.value).abs() })
}

/// The iterated correction term of the heat-ball identity computed as a
/// genuinely nested integral over `η`.
pub fn heat_ball_correction_iterated(kernel: &Kernel, v: &TestField, r: f64) -> Result<Estimate> {
    if v.classification() == Classification::Caloric {
        return Ok(Estimate::exact(0.0));
    }
    let n = kernel.dimension() as i32;
    let outer = Integrator::new(Tolerance::new(1e-10, 1e-8)).integrate(
        |eta| {
            if eta <= 0.0 {
                return Ok(0.0);
            }
            let level = eta.powi(-n);
            let inner = heat_ball(kernel, eta)?
                .ball_integrate(|p| Ok((p.kernel.value - level) * v.heat_operator_mean(p.rho, -p.tau)))?;
            Ok(eta.powi(n - 1) * inner.value)
        },
        0.0,
        r,
    )?;
    Ok(outer.scale(n as f64 / r.powi(n)))
}

/// `n ∫₀^r η^{n-1} J_v(η) dη`.
pub fn integrated_j(kernel: &Kernel, v: &TestField, r: f64) -> Result<Estimate> {
    let n = kernel.dimension() as i32;
    let tol = match kernel.kind() {
        KernelKind::SubHeat => Tolerance::new(1e-8, 1e-6),
        _ => Tolerance::new(1e-11, 1e-9),
    };
    let est = Integrator::new(tol).integrate(
        |eta| if eta <= 0.0 { Ok(0.0) } else { Ok(eta.powi(n - 1) * j_v(kernel, v, eta)?.value) },
        0.0,
        r,
    )?;
    Ok(est.scale(n as f64))
}

/// Relative residual of `rⁿ I_v(r) = n ∫₀^r η^{n-1} J_v(η) dη`.
pub fn sphere_ball_relation(kernel: &Kernel, v: &TestField, r: f64) -> Result<(f64, f64, f64)> {
    let lhs = level_power(kernel, r) * i_v(kernel, v, r)?.value;
    let rhs = integrated_j(kernel, v, r)?.value;
    Ok((lhs, rhs, (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE)))
}

/// Relative residual of `rⁿ Î(0, r) = n ∫₀^r η^{n-1} Ĵ(η) dη` with both
/// quantities in their rewritten forms.
pub fn hat_relation(kernel: &Kernel, r: f64) -> Result<(f64, f64, f64)> {
    let n = kernel.dimension() as i32;
    let lhs = r.powi(n) * ihat(kernel, 0.0, r)?.value;
    let rhs = Integrator::new(Tolerance::new(1e-8, 1e-6))
        .integrate(|eta| if eta <= 0.0 { Ok(0.0) } else { Ok(eta.powi(n - 1) * jhat(kernel, eta)?.value) }, 0.0, r)?
        .value
        * n as f64;
    Ok((lhs, rhs, (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE)))
}

/// `Ĵ(r) = ∫_{∂E_r} (|∇u|² − u u_τ)/√(|∇u|² + u_τ²) dÃ`, the pure-surface
/// form of `J_1(r)`.
pub fn jhat(kernel: &Kernel, r: f64) -> Result<Estimate> {
    heat_ball(kernel, r)?.sphere_integrate(|p| {
        let k = p.kernel;
        Ok((k.d_rho * k.d_rho - k.value * k.d_tau) / k.d_rho.hypot(k.d_tau))
    })
}

/// `r^{-n} ∫_{∂E_r} Q(u) / √(|∇ log u|² + (log u)_τ²) dÃ`, the Harnack form
/// of the same quantity.
pub fn jhat_harnack_form(kernel: &Kernel, r: f64) -> Result<Estimate> {
    let est = heat_ball(kernel, r)?.sphere_integrate(|p| {
        let k = p.kernel;
        Ok(k.harnack_q() / (k.d_rho / k.value).hypot(k.d_tau / k.value))
    })?;
    Ok(est.scale(1.0 / level_power(kernel, r)))
}

/// `Î(a, r) = (rⁿ − aⁿ)^{-1} ∫_{E_r ∖ E_a} Q(u)`; `a = 0` gives the full ball.
pub fn ihat(kernel: &Kernel, a: f64, r: f64) -> Result<Estimate> {
    if !(a >= 0.0 && a < r) {
        return Err(MvError::Range(format!("need 0 <= a < r, got a = {a}, r = {r}")));
    }
    let outer = heat_ball(kernel, r)?;
    let integrand = |p: &RegionPoint| Ok(p.kernel.harnack_q());
    let est = if a == 0.0 { outer.ball_integrate(integrand)? } else { outer.annulus_integrate(&heat_ball(kernel, a)?, integrand)? };
    let n = kernel.dimension() as i32;
    Ok(est.scale(1.0 / (r.powi(n) - a.powi(n))))
}

/// The original and rewritten forms of `J_1(r)` and `I_1(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceForms {
    /// Flux surface term plus the `r^{-n}∫R` volume term.
    pub j_original: f64,
    /// Pure surface form.
    pub j_surface: f64,
    /// Harnack surface form normalized by `rⁿ`.
    pub j_harnack: f64,
    /// `r^{-n}∫(|∇ log u|² + R ψ_r)`.
    pub i_original: f64,
    /// `r^{-n}∫ Q(u)`.
    pub i_harnack: f64,
    pub j_residual: f64,
    pub i_residual: f64,
}

pub fn surface_form_residual(kernel: &Kernel, r: f64) -> Result<SurfaceForms> {
    let one = TestField::new(FieldName::Constant, kernel.geometry().clone())?;
    let j_original = j_v(kernel, &one, r)?.value;
    let j_surface = jhat(kernel, r)?.value;
    let j_harnack = jhat_harnack_form(kernel, r)?.value;
    let i_original = i_v(kernel, &one, r)?.value;
    let i_harnack = ihat(kernel, 0.0, r)?.value;
    Ok(SurfaceForms {
        j_original,
        j_surface,
        j_harnack,
        i_original,
        i_harnack,
        j_residual: (j_original - j_surface).abs().max((j_surface - j_harnack).abs()),
        i_residual: (i_original - i_harnack).abs(),
    })
}

/// Result of [`jhat_sweep`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JhatSweep {
    pub a: f64,
    pub jhat: SweepReport,
    pub ihat: SweepReport,
    /// `Ĵ(r) ≤ Î(a, r)` within the combined error budget, per grid point.
    pub ordered: Vec<bool>,
    /// Central-difference slopes `dĴ/dr` at each grid point.
    pub jhat_slopes: Vec<f64>,
}

impl JhatSweep {
    pub fn pass(&self) -> bool {
        self.jhat.monotone() && self.ihat.monotone() && self.ordered.iter().all(|&b| b)
    }
}

/// Relative step of the `dĴ/dr` central difference.
pub const JHAT_SLOPE_STEP: f64 = 1e-3;

/// `Ĵ(r)` and `Î(a, r)` over an increasing grid of levels, asserted
/// non-increasing with `Ĵ ≤ Î`.
pub fn jhat_sweep(kernel: &Kernel, grid: &[f64], a: f64, tol: f64) -> Result<JhatSweep> {
    let rows: Vec<Result<(Estimate, Estimate, f64)>> = grid
        .par_iter()
        .map(|&r| {
            let j = jhat(kernel, r)?;
            let i = ihat(kernel, a, r)?;
            let h = JHAT_SLOPE_STEP * r;
            let slope = (jhat(kernel, r + h)?.value - jhat(kernel, r - h)?.value) / (2.0 * h);
            Ok((j, i, slope))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let j: Vec<Estimate> = rows.iter().map(|r| r.0).collect();
    let i: Vec<Estimate> = rows.iter().map(|r| r.1).collect();
    let ordered = j.iter().zip(&i).map(|(j, i)| j.value <= i.value + j.error + i.error + tol).collect();
    Ok(JhatSweep {
        a,
        jhat: SweepReport::new("jhat", Direction::NonIncreasing, grid.to_vec(), &j, tol)?,
        ihat: SweepReport::new("ihat", Direction::NonIncreasing, grid.to_vec(), &i, tol)?,
        ordered,
        jhat_slopes: rows.iter().map(|r| r.2).collect(),
    })
}

/// `Î(a, r)` over an increasing grid of inner levels `a < r`.
pub fn ihat_inner_sweep(kernel: &Kernel, a_grid: &[f64], r: f64, tol: f64) -> Result<SweepReport> {
    let est: Vec<Result<Estimate>> = a_grid.par_iter().map(|&a| ihat(kernel, a, r)).collect();
    let est = est.into_iter().collect::<Result<Vec<_>>>()?;
    SweepReport::new("ihat-inner", Direction::NonIncreasing, a_grid.to_vec(), &est, tol)
}

/// Parabolic `I_v` and `J_v` over a grid, with the direction and slack
/// given by the caller.
pub fn heat_sweep(kernel: &Kernel, v: &TestField, grid: &[f64], direction: Direction, tol: f64) -> Result<(SweepReport, SweepReport)> {
    let rows: Vec<Result<(Estimate, Estimate)>> = grid.par_iter().map(|&r| Ok((i_v(kernel, v, r)?, j_v(kernel, v, r)?))).collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let i: Vec<Estimate> = rows.iter().map(|r| r.0).collect();
    let j: Vec<Estimate> = rows.iter().map(|r| r.1).collect();
    Ok((
        SweepReport::new("I", direction, grid.to_vec(), &i, tol)?,
        SweepReport::new("J", direction, grid.to_vec(), &j, tol)?,
    ))
}

/// Extra slack allowed on reduced-volume verdicts.
pub const THETA_SLACK: f64 = 1e-5;

/// Reduced volume `θ(τ)` over an increasing τ-grid, asserted non-increasing.
pub fn theta_sweep(field: &ReducedDistanceField, taus: &[f64]) -> Result<SweepReport> {
    let est: Vec<Result<Estimate>> = taus.par_iter().map(|&t| field.reduced_volume(t)).collect();
    let est = est.into_iter().collect::<Result<Vec<_>>>()?;
    SweepReport::new("theta", Direction::NonIncreasing, taus.to_vec(), &est, THETA_SLACK)
}

/// `∫_{P₂^s} v (u − r^{-n}) dμ` on the slice `τ = s` of the heat ball.
pub fn cap_integral(kernel: &Kernel, v: &TestField, r: f64, s: f64) -> Result<Estimate> {
    let region = heat_ball(kernel, r)?;
    let rho_s = region.profile(s)?;
    let level = 1.0 / level_power(kernel, r);
    let geom = kernel.geometry();
    Integrator::new(Tolerance::new(1e-12, 1e-10)).integrate(
        |rho| {
            if rho <= 0.0 {
                return Ok(0.0);
            }
            let u = kernel.value(rho, s)?;
            Ok(v.spherical_mean(MeanOf::Value, rho, -s) * (u - level) * geom.sphere_area(rho, -s)?)
        },
        0.0,
        rho_s,
    )
}

/// Residuals of the pointwise soliton identities at a set of `(ρ, τ)` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonCheck {
    pub samples: Vec<(f64, f64)>,
    /// Signed `ℓ_τ − Δℓ + |∇ℓ|² − R + n/(2τ)`.
    pub heat_ell: Vec<f64>,
    /// Signed `−2ℓ_τ − |∇ℓ|² + R − ℓ/τ`.
    pub hyper_ell: Vec<f64>,
    /// `(τ(2Δℓ − |∇ℓ|² + R) + ℓ − n) K̂`.
    pub entropy: Vec<f64>,
    /// Largest eigenvalue magnitude of `Ric + ∇²ℓ − g/(2τ)`.
    pub soliton_tensor: Vec<f64>,
}

impl SolitonCheck {
    pub fn max_abs(values: &[f64]) -> f64 {
        values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

pub fn soliton_residuals(field: &ReducedDistanceField, samples: &[(f64, f64)]) -> Result<SolitonCheck> {
    let geom = field.geometry();
    let n = field.dimension() as f64;
    let rows: Vec<Result<[f64; 4]>> = samples
        .par_iter()
        .map(|&(rho, tau)| {
            let t = -tau;
            let jet = field.jet(rho, tau, FD_STEP)?;
            let w = geom.warp(rho, t);
            // ℓ_ρ/ρ → ℓ_ρρ at the pole
            let tangential = if rho == 0.0 { jet.ell_rhorho } else { w.dphi / w.phi * jet.ell_rho };
            let laplacian = jet.ell_rhorho + (n - 1.0) * tangential;
            let grad_sq = jet.ell_rho * jet.ell_rho;
            let r = geom.r_trace(rho, t);
            let heat = jet.ell_tau - laplacian + grad_sq - r + n / (2.0 * tau);
            let hyper = -2.0 * jet.ell_tau - grad_sq + r - jet.ell / tau;
            let k_hat = (4.0 * std::f64::consts::PI * tau).powf(-0.5 * n) * (-jet.ell).exp();
            let entropy = (tau * (2.0 * laplacian - grad_sq + r) + jet.ell - n) * k_hat;
            let (ric_rad, ric_tan) = geom.ricci(rho, t);
            let tensor = (ric_rad + jet.ell_rhorho - 0.5 / tau).abs().max((ric_tan + tangential - 0.5 / tau).abs());
            Ok([heat, hyper, entropy, tensor])
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SolitonCheck {
        samples: samples.to_vec(),
        heat_ell: rows.iter().map(|r| r[0]).collect(),
        hyper_ell: rows.iter().map(|r| r[1]).collect(),
        entropy: rows.iter().map(|r| r[2]).collect(),
        soliton_tensor: rows.iter().map(|r| r[3]).collect(),
    })
}

/// `|Q(K̂) − n/(2τ) + 𝒦/(2τ^{3/2})|` at each sample: the left side from
/// finite differences of `ℓ`, the right side from the curvature integral
/// carried along the minimizing geodesic.
pub fn harnack_rcf_residuals(kernel: &Kernel, samples: &[(f64, f64)]) -> Result<Vec<f64>> {
    let field = kernel
        .reduced_field()
        .ok_or_else(|| MvError::Unsupported("the Harnack decomposition needs the sub-heat kernel".into()))?;
    let n = kernel.dimension() as f64;
    let rows: Vec<Result<f64>> = samples
        .par_iter()
        .map(|&(rho, tau)| {
            let q = kernel.harnack_q(rho, tau)?;
            let k = field.k_curvature_integral(rho, tau)?;
            Ok((q - n / (2.0 * tau) + k / (2.0 * tau.powf(1.5))).abs())
        })
        .collect();
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_field;
    use crate::geometry::FlowGeometry;

    #[test]
    fn caloric_heat_ball_identity_small() {
        let e2 = FlowGeometry::euclidean(2);
        let h = Kernel::heat(e2.clone()).unwrap();
        let u = make_field(FieldName::CaloricQuadratic, &e2).unwrap();
        let ball = mv_heat_ball(&h, &u, 0.5).unwrap();
        assert!(ball.residual <= 1e-5, "{ball:?}");
        let sphere = mv_heat_sphere(&h, &u, 0.5).unwrap();
        assert!(sphere.residual <= 1e-5, "{sphere:?}");
    }

    #[test]
    fn constant_field_on_euclidean() {
        let e3 = FlowGeometry::euclidean(3);
        let h = Kernel::heat(e3.clone()).unwrap();
        let one = TestField::new(FieldName::Constant, e3).unwrap();
        assert!(mv_heat_ball(&h, &one, 0.7).unwrap().residual <= 1e-5);
        assert!(mv_heat_sphere(&h, &one, 0.7).unwrap().residual <= 1e-5);
        let forms = surface_form_residual(&h, 0.7).unwrap();
        assert!(forms.j_residual <= 1e-6 && forms.i_residual <= 1e-6, "{forms:?}");
    }

    #[test]
    fn collapsed_correction_matches_nested() {
        let e1 = FlowGeometry::euclidean(1);
        let h = Kernel::heat(e1.clone()).unwrap();
        let v = make_field(FieldName::ExpRadial, &e1).unwrap();
        let r = 0.6;
        let rn = r;
        let collapsed = LevelRegion::heat_ball(h.clone(), r)
            .unwrap()
            .ball_integrate(|p| {
                let u = p.kernel.value;
                Ok((u - 1.0 / rn - (u * rn).ln() / rn) * v.heat_operator_mean(p.rho, -p.tau))
            })
            .unwrap();
        let nested = heat_ball_correction_iterated(&h, &v, r).unwrap();
        assert!(collapsed.value.abs() > 1e-3);
        assert!((collapsed.value - nested.value).abs() <= 1e-7, "{collapsed:?} {nested:?}");
    }

    #[test]
    fn caps_converge_to_center_value() {
        let e2 = FlowGeometry::euclidean(2);
        let h = Kernel::heat(e2.clone()).unwrap();
        let one = TestField::new(FieldName::Constant, e2).unwrap();
        let errs: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&s| (cap_integral(&h, &one, 1.0, s).unwrap().value - 1.0).abs()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2] && errs[2] < 1e-2, "{errs:?}");
    }
}
