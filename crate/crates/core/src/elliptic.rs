//! Elliptic mean-value identities, inequalities and the monotone
//! quantities `I_v`, `J_v` over G-balls centered at the pole.
//!
//! Every integrand is reduced to a radial one through exact spherical means,
//! so sphere integrals are point evaluations and ball integrals are 1-D.

use rayon::prelude::*;

use crate::error::{MvError, Result};
use crate::fields::{MeanOf, TestField};
use crate::geometry::{FlowGeometry, GeometryKind};
use crate::kernels::{Kernel, KernelKind};
use crate::numerics::{Estimate, Integrator, Tolerance};
use crate::regions::LevelRegion;
use crate::sweep::{Direction, SweepReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvForm {
    Sphere,
    Ball,
}

/// `v(x)` against the right-hand side of a mean-value formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: Estimate,
    pub residual: f64,
}

/// Whether the minimal positive Green's function of the model decays to 0
/// at infinity.
pub fn is_strongly_non_parabolic(geom: &FlowGeometry) -> bool {
    match geom.kind() {
        GeometryKind::Euclidean | GeometryKind::GaussianSoliton => geom.dimension() >= 3,
        GeometryKind::Hyperbolic { .. } => geom.dimension() >= 2,
        GeometryKind::ShrinkingSphere => false,
    }
}

fn iterated_tolerance() -> Integrator {
    Integrator::new(Tolerance::new(1e-13, 1e-11))
}

fn ball(kernel: &Kernel, r: f64) -> Result<LevelRegion> {
    if kernel.kind().is_parabolic() {
        return Err(MvError::Unsupported("elliptic formulas need an elliptic kernel".into()));
    }
    LevelRegion::ball(kernel.clone(), r)
}

/// `J_v(r) = ∫_{Ψ_r} |∇G| v dA`.
pub fn j_v(kernel: &Kernel, v: &TestField, r: f64) -> Result<Estimate> {
    ball(kernel, r)?.sphere_integrate(|p| Ok(-p.kernel.d_rho * v.spherical_mean(MeanOf::Value, p.rho, 0.0)))
}

/// `I_v(r) = r^{-n} ∫_{Ω_r} |∇ log G|² v dμ`.
pub fn i_v(kernel: &Kernel, v: &TestField, r: f64) -> Result<Estimate> {
    let n = kernel.dimension() as i32;
    let est = ball(kernel, r)?.ball_integrate(|p| {
        Ok((p.kernel.d_rho / p.kernel.value).powi(2) * v.spherical_mean(MeanOf::Value, p.rho, 0.0))
    })?;
    Ok(est.scale(r.powi(-n)))
}

/// `∫_{Ω_r} φ_r f dμ` with `φ_r = G − r^{-n}` and `f` radial.
fn phi_moment<F: Fn(f64) -> f64>(kernel: &Kernel, r: f64, f: F) -> Result<Estimate> {
    let level = r.powi(-(kernel.dimension() as i32));
    ball(kernel, r)?.ball_integrate(|p| Ok((p.kernel.value - level) * f(p.rho)))
}

/// `∫_{Ω_r} ψ_r f dμ` with `ψ_r = log(G rⁿ)`.
fn psi_moment<F: Fn(f64) -> f64>(kernel: &Kernel, r: f64, f: F) -> Result<Estimate> {
    let n = kernel.dimension() as f64;
    ball(kernel, r)?.ball_integrate(|p| Ok((p.kernel.value.ln() + n * r.ln()) * f(p.rho)))
}

/// `(n/rⁿ) ∫₀^r η^{n-1} ∫_{Ω_η} φ_η f dμ dη`, computed as a nested integral.
fn iterated_phi_term<F: Fn(f64) -> f64 + Sync>(kernel: &Kernel, r: f64, f: &F) -> Result<Estimate> {
    let n = kernel.dimension() as i32;
    let outer = iterated_tolerance().integrate(
        |eta| {
            if eta <= 0.0 {
                return Ok(0.0);
            }
            Ok(eta.powi(n - 1) * phi_moment(kernel, eta, f)?.value)
        },
        0.0,
        r,
    )?;
    Ok(outer.scale(n as f64 / r.powi(n)))
}

/// Right-hand side of the sphere or ball mean-value formula at level `r`.
fn mv_rhs(kernel: &Kernel, v: &TestField, r: f64, form: MvForm) -> Result<Estimate> {
    let lap = |rho: f64| v.spherical_mean(MeanOf::Laplacian, rho, 0.0);
    match form {
        MvForm::Sphere => Ok(j_v(kernel, v, r)? - phi_moment(kernel, r, lap)?),
        MvForm::Ball => Ok(i_v(kernel, v, r)? - iterated_phi_term(kernel, r, &lap)?),
    }
}

/// Checks `v(x) = J_v(r) − ∫ φ_r Δv` (sphere) or its ball version for the
/// exact Green's function, with `x` the pole.
pub fn mv_identity(green: &Kernel, v: &TestField, r: f64, form: MvForm) -> Result<IdentityCheck> {
    let exact = match (green.kind(), green.geometry().kind()) {
        (KernelKind::ExactGreen, _) => true,
        (KernelKind::SubGreen { k }, GeometryKind::Hyperbolic { k: kg }) => (k - kg).abs() <= 1e-15 * kg,
        _ => false,
    };
    if !exact {
        return Err(MvError::Unsupported("mean-value identities need the exact Green's function".into()));
    }
    let lhs = v.spherical_mean(MeanOf::Value, 0.0, 0.0);
    let rhs = mv_rhs(green, v, r, form)?;
    Ok(IdentityCheck { lhs, rhs, residual: (lhs - rhs.value).abs() })
}

/// Signed deficit of the sub-Green (`v(x) − rhs`) or sup-Green
/// (`rhs − v(x)`) mean-value inequality; non-negative when the inequality holds.
pub fn mv_inequality_deficit(kernel: &Kernel, v: &TestField, r: f64, form: MvForm) -> Result<Estimate> {
    let region = ball(kernel, r)?;
    let rho_star = region.rho_star().unwrap_or(0.0);
    let low = v.min_on_ball(rho_star, 0.0);
    if low < 0.0 {
        return Err(MvError::Precondition(format!("field {} takes the value {low} < 0 on the region", v.name())));
    }
    let value = v.spherical_mean(MeanOf::Value, 0.0, 0.0);
    let rhs = mv_rhs(kernel, v, r, form)?;
    match kernel.kind() {
        KernelKind::SubGreen { .. } | KernelKind::ExactGreen => Ok(Estimate::new(value - rhs.value, rhs.error)),
        KernelKind::SupGreen => Ok(Estimate::new(rhs.value - value, rhs.error)),
        _ => Err(MvError::Unsupported("mean-value inequalities need a Green-type kernel".into())),
    }
}

/// `∫_{Ω_r} Δv dμ`.
pub fn laplacian_mass(kernel: &Kernel, v: &TestField, r: f64) -> Result<Estimate> {
    ball(kernel, r)?.ball_integrate(|p| Ok(v.spherical_mean(MeanOf::Laplacian, p.rho, 0.0)))
}

/// One derivative check at an interior grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    pub r: f64,
    /// Central difference of the quantity.
    pub derivative: f64,
    /// Right-hand side of the derivative formula.
    pub bound: f64,
    /// Equality, upper bound or lower bound, depending on the kernel.
    pub relation: Relation,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    AtMost,
    AtLeast,
}

impl Relation {
    fn holds(&self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Equal => (lhs - rhs).abs() <= tol,
            Relation::AtMost => lhs <= rhs + tol,
            Relation::AtLeast => lhs >= rhs - tol,
        }
    }
}

fn relation_for(kernel: &Kernel) -> Relation {
    match (kernel.kind(), kernel.geometry().kind()) {
        (KernelKind::ExactGreen, _) => Relation::Equal,
        (KernelKind::SubGreen { k }, GeometryKind::Hyperbolic { k: kg }) if (k - kg).abs() <= 1e-15 * kg => {
            Relation::Equal
        }
        (KernelKind::SubGreen { .. }, _) => Relation::AtMost,
        _ => Relation::AtLeast,
    }
}

/// Result of [`elliptic_sweep`].
#[derive(Debug, Clone)]
pub struct EllipticSweep {
    pub i: SweepReport,
    pub j: SweepReport,
    /// `dJ/dr` against `(n/r^{n+1}) ∫ Δv`.
    pub j_derivative: Vec<DerivativeCheck>,
    /// `dI/dr` against `(n/r^{n+1}) ∫ Δv ψ_r`.
    pub i_derivative: Vec<DerivativeCheck>,
    /// Largest relative residual of `rⁿ I(r) = n ∫₀^r η^{n-1} J(η) dη`.
    pub relation_residual: f64,
}

/// Central-difference step used for `dI/dr` and `dJ/dr`.
pub const SWEEP_FD_STEP: f64 = 1e-4;

/// `n ∫₀^r η^{n-1} J_v(η) dη`.
pub fn integrated_j(kernel: &Kernel, v: &TestField, r: f64) -> Result<Estimate> {
    let n = kernel.dimension() as i32;
    let est = iterated_tolerance().integrate(
        |eta| if eta <= 0.0 { Ok(0.0) } else { Ok(eta.powi(n - 1) * j_v(kernel, v, eta)?.value) },
        0.0,
        r,
    )?;
    Ok(est.scale(n as f64))
}

/// Sweeps `I_v` and `J_v` over an increasing grid. `direction` is the
/// verdict asserted for both quantities; derivative checks use the
/// equality or inequality appropriate to the kernel kind.
pub fn elliptic_sweep(kernel: &Kernel, v: &TestField, grid: &[f64], direction: Direction, tol: f64) -> Result<EllipticSweep> {
    let n = kernel.dimension() as i32;
    let rows: Vec<Result<(Estimate, Estimate, DerivativeCheck, DerivativeCheck, f64)>> = grid
        .par_iter()
        .map(|&r| {
            let i = i_v(kernel, v, r)?;
            let j = j_v(kernel, v, r)?;
            let h = SWEEP_FD_STEP * r;
            let dj = (j_v(kernel, v, r + h)?.value - j_v(kernel, v, r - h)?.value) / (2.0 * h);
            let di = (i_v(kernel, v, r + h)?.value - i_v(kernel, v, r - h)?.value) / (2.0 * h);
            let coef = n as f64 / r.powi(n + 1);
            let lap = |rho: f64| v.spherical_mean(MeanOf::Laplacian, rho, 0.0);
            let j_bound = coef * laplacian_mass(kernel, v, r)?.value;
            let i_bound = coef * psi_moment(kernel, r, lap)?.value;
            let relation = relation_for(kernel);
            let slack = tol.max(1e-6 * j_bound.abs());
            let jd = DerivativeCheck { r, derivative: dj, bound: j_bound, relation, holds: relation.holds(dj, j_bound, slack) };
            let slack = tol.max(1e-6 * i_bound.abs());
            let id = DerivativeCheck { r, derivative: di, bound: i_bound, relation, holds: relation.holds(di, i_bound, slack) };
            let lhs = r.powi(n) * i.value;
            let rhs = integrated_j(kernel, v, r)?.value;
            let rel = (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE);
            Ok((i, j, jd, id, rel))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let i_est: Vec<Estimate> = rows.iter().map(|r| r.0).collect();
    let j_est: Vec<Estimate> = rows.iter().map(|r| r.1).collect();
    Ok(EllipticSweep {
        i: SweepReport::new("I", direction, grid.to_vec(), &i_est, tol)?,
        j: SweepReport::new("J", direction, grid.to_vec(), &j_est, tol)?,
        j_derivative: rows.iter().map(|r| r.2).collect(),
        i_derivative: rows.iter().map(|r| r.3).collect(),
        relation_residual: rows.iter().map(|r| r.4).fold(0.0, f64::max),
    })
}

/// Both sides of `(n/rⁿ)∫₀^r η^{n-1}∫_{Ω_η} f φ_η dη = ∫₀^r (n/η^{n+1}) ∫_{Ω_η} f ψ_η dη`
/// by independent nested quadratures; returns `(lhs, rhs, |lhs − rhs|)`.
pub fn iterated_identity_check<F>(kernel: &Kernel, f: F, r: f64) -> Result<(f64, f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    let n = kernel.dimension() as i32;
    let lhs = iterated_phi_term(kernel, r, &f)?.value;
    let rhs = iterated_tolerance()
        .integrate(
            |eta| {
                if eta <= 0.0 {
                    return Ok(0.0);
                }
                Ok(n as f64 / eta.powi(n + 1) * psi_moment(kernel, eta, &f)?.value)
            },
            0.0,
            r,
        )?
        .value;
    Ok((lhs, rhs, (lhs - rhs).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_field, FieldName};
    use std::f64::consts::PI;

    fn e3_green() -> Kernel {
        Kernel::exact_green(FlowGeometry::euclidean(3)).unwrap()
    }

    #[test]
    fn constant_and_harmonic_identities() {
        let g = e3_green();
        let e3 = FlowGeometry::euclidean(3);
        let one = make_field(FieldName::Constant, &e3).unwrap();
        assert!(mv_identity(&g, &one, 1.0, MvForm::Sphere).unwrap().residual <= 1e-8);
        let hq = make_field(FieldName::HarmonicQuadratic, &e3).unwrap();
        for r in [0.5, 1.0, 2.0] {
            assert!(mv_identity(&g, &hq, r, MvForm::Sphere).unwrap().rhs.value.abs() <= 1e-7);
        }
    }

    #[test]
    fn superharmonic_identity_both_forms() {
        let g = e3_green();
        let v = make_field(FieldName::Superharmonic, &FlowGeometry::euclidean(3)).unwrap();
        let s = mv_identity(&g, &v, 1.0, MvForm::Sphere).unwrap();
        assert!(s.residual <= 1e-6, "{s:?}");
        let b = mv_identity(&g, &v, 1.0, MvForm::Ball).unwrap();
        assert!(b.residual <= 1e-6, "{b:?}");
    }

    #[test]
    fn derivative_of_j() {
        let g = e3_green();
        let v = make_field(FieldName::Superharmonic, &FlowGeometry::euclidean(3)).unwrap();
        let sw = elliptic_sweep(&g, &v, &[0.8, 1.0, 1.2], Direction::NonIncreasing, 1e-8).unwrap();
        let d = sw.j_derivative[1];
        assert!((d.derivative + 3.0 / (8.0 * PI * PI)).abs() < 1e-4, "{d:?}");
        assert!(d.holds && sw.i_derivative.iter().all(|c| c.holds));
        assert!(sw.i.monotone() && sw.j.monotone());
        assert!(sw.relation_residual <= 1e-6);
    }

    #[test]
    fn iterated_identity_examples() {
        let g = e3_green();
        let (_, _, res) = iterated_identity_check(&g, |_| 1.0, 1.0).unwrap();
        assert!(res <= 1e-6);
        let (_, _, res) = iterated_identity_check(&g, |_| 6.0, 1.0).unwrap();
        assert!(res <= 1e-6);
        assert_eq!(iterated_identity_check(&g, |_| 0.0, 1.0).unwrap().2, 0.0);
    }

    #[test]
    fn precondition_and_kind_errors() {
        let g = e3_green();
        let lin = make_field(FieldName::Linear, &FlowGeometry::euclidean(3)).unwrap();
        assert!(matches!(mv_inequality_deficit(&g, &lin, 1.0, MvForm::Sphere), Err(MvError::Precondition(_))));
        let sup = Kernel::sup_green(FlowGeometry::hyperbolic(3, 1.0).unwrap()).unwrap();
        let one = make_field(FieldName::Constant, sup.geometry()).unwrap();
        assert!(mv_identity(&sup, &one, 1.0, MvForm::Sphere).is_err());
        assert!(is_strongly_non_parabolic(&FlowGeometry::euclidean(3)));
        assert!(!is_strongly_non_parabolic(&FlowGeometry::euclidean(2)));
    }
}
