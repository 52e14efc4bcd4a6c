//! Closed-form and comparison kernels centered at the pole (and at `t₀ = 0`
//! for parabolic kinds, with `τ = -t`).
//!
//! Every kernel is radial, so one evaluation contract suffices: the value,
//! the radial derivative at fixed time, and the `τ`-derivative at a fixed
//! point of the manifold.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{range, unsupported, MvError, Result};
use crate::geometry::{FlowGeometry, GeometryKind};
use crate::numerics::{unit_sphere_area, Integrator, Tolerance};
use crate::reduced::ReducedDistanceField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// Minimal positive Green's function of the backing model.
    ExactGreen,
    /// Green's function of the space form of curvature `-k²`.
    SubGreen { k: f64 },
    /// Euclidean Green's function evaluated at the manifold distance.
    SupGreen,
    /// Heat kernel of a static model.
    Heat,
    /// `K̂ = (4πτ)^{-n/2} e^{-ℓ}`.
    SubHeat,
}

impl KernelKind {
    pub fn is_parabolic(&self) -> bool {
        matches!(self, KernelKind::Heat | KernelKind::SubHeat)
    }
}

/// Value and first derivatives of a radial kernel. `d_tau` is zero for
/// elliptic kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub value: f64,
    pub d_rho: f64,
    pub d_tau: f64,
}

impl KernelSample {
    /// `|∇ log u|² − ∂τ log u`.
    pub fn harnack_q(&self) -> f64 {
        (self.d_rho / self.value).powi(2) - self.d_tau / self.value
    }
}

#[derive(Debug, Clone)]
pub struct Kernel {
    kind: KernelKind,
    geom: FlowGeometry,
    reduced: Option<Arc<ReducedDistanceField>>,
}

fn space_form_warp(k: f64, s: f64) -> f64 {
    if k == 0.0 {
        s
    } else {
        (k * s).sinh() / k
    }
}

impl Kernel {
    pub fn new(kind: KernelKind, geom: FlowGeometry) -> Result<Self> {
        let n = geom.dimension();
        match kind {
            KernelKind::ExactGreen => match geom.kind() {
                GeometryKind::Euclidean | GeometryKind::GaussianSoliton if n >= 3 => {}
                GeometryKind::Hyperbolic { .. } if n >= 2 => {}
                _ => return unsupported(format!("no minimal positive Green's function for {:?}, n = {n}", geom.kind())),
            },
            KernelKind::SubGreen { k } => {
                if !(k > 0.0 && k.is_finite()) {
                    return range(format!("sub-Green curvature parameter must be positive, got {k}"));
                }
                if n < 2 || !geom.is_static() {
                    return unsupported("sub-Green kernels need a static model with n >= 2");
                }
            }
            KernelKind::SupGreen => {
                if n < 3 {
                    return unsupported("sup-Green kernel needs n >= 3");
                }
                if !matches!(geom.kind(), GeometryKind::Euclidean | GeometryKind::Hyperbolic { .. }) {
                    return unsupported("sup-Green kernel needs a Cartan-Hadamard model");
                }
            }
            KernelKind::Heat => match geom.kind() {
                GeometryKind::Euclidean | GeometryKind::GaussianSoliton => {}
                GeometryKind::Hyperbolic { .. } if n == 3 => {}
                _ => return unsupported(format!("no closed-form heat kernel for {:?}, n = {n}", geom.kind())),
            },
            KernelKind::SubHeat => {
                return Ok(Self { kind, reduced: Some(Arc::new(ReducedDistanceField::new(geom.clone()))), geom })
            }
        }
        Ok(Self { kind, geom, reduced: None })
    }

    pub fn exact_green(geom: FlowGeometry) -> Result<Self> {
        Self::new(KernelKind::ExactGreen, geom)
    }

    pub fn sub_green(geom: FlowGeometry, k: f64) -> Result<Self> {
        Self::new(KernelKind::SubGreen { k }, geom)
    }

    pub fn sup_green(geom: FlowGeometry) -> Result<Self> {
        Self::new(KernelKind::SupGreen, geom)
    }

    pub fn heat(geom: FlowGeometry) -> Result<Self> {
        Self::new(KernelKind::Heat, geom)
    }

    /// Sub-heat kernel sharing an existing reduced-distance field (and its memo).
    pub fn sub_heat(field: Arc<ReducedDistanceField>) -> Self {
        Self { kind: KernelKind::SubHeat, geom: field.geometry().clone(), reduced: Some(field) }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn geometry(&self) -> &FlowGeometry {
        &self.geom
    }

    pub fn dimension(&self) -> usize {
        self.geom.dimension()
    }

    pub fn reduced_field(&self) -> Option<&Arc<ReducedDistanceField>> {
        self.reduced.as_ref()
    }

    /// Curvature parameter of the space form whose Green's function this is.
    fn green_curvature(&self) -> f64 {
        match (self.kind, self.geom.kind()) {
            (KernelKind::SubGreen { k }, _) => k,
            (KernelKind::ExactGreen, GeometryKind::Hyperbolic { k }) => k,
            _ => 0.0,
        }
    }

    /// Green-type kernel value and `|∇G|` at distance `d`.
    pub fn green_value(&self, d: f64) -> Result<(f64, f64)> {
        if self.kind.is_parabolic() {
            return unsupported("green_value needs an elliptic kernel");
        }
        if !(d > 0.0) {
            return range(format!("distance must be positive, got {d}"));
        }
        let n = self.dimension();
        let area = unit_sphere_area(n - 1);
        let k = self.green_curvature();
        let flux = 1.0 / (area * space_form_warp(k, d).powi(n as i32 - 1));
        if k == 0.0 {
            let value = d.powi(2 - n as i32) / ((n as f64 - 2.0) * area);
            return Ok((value, flux));
        }
        let value = match n {
            2 => (1.0 / (2.0 * PI)) * (1.0 / (0.5 * k * d).tanh()).ln(),
            3 => k * (-k * d).exp() / (4.0 * PI * (k * d).sinh()),
            _ => {
                Integrator::new(Tolerance::new(1e-15, 1e-13))
                    .integrate_to_infinity(|s| Ok(1.0 / (area * space_form_warp(k, s).powi(n as i32 - 1))), d)?
                    .value
            }
        };
        Ok((value, flux))
    }

    /// Heat kernel value, `|∇H|` and `∂τ H`.
    pub fn heat_kernel(&self, d: f64, tau: f64) -> Result<(f64, f64, f64)> {
        if self.kind != KernelKind::Heat {
            return unsupported("heat_kernel needs the heat kind");
        }
        if !(tau > 0.0) {
            return range(format!("tau must be positive, got {tau}"));
        }
        if !(d >= 0.0) {
            return range(format!("distance must be non-negative, got {d}"));
        }
        let n = self.dimension() as f64;
        match self.geom.kind() {
            GeometryKind::Hyperbolic { k } => {
                let kd = k * d;
                // log(kd / sinh kd) and its derivative, with series near 0
                let (log_ratio, dlog_ratio) = if kd < 1e-4 {
                    (-kd * kd / 6.0, -k * kd / 3.0)
                } else {
                    ((kd / kd.sinh()).ln(), 1.0 / d - k / kd.tanh())
                };
                let value = (4.0 * PI * tau).powf(-1.5) * (log_ratio - d * d / (4.0 * tau) - k * k * tau).exp();
                let d_rho = value * (dlog_ratio - d / (2.0 * tau));
                let d_tau = value * (-1.5 / tau + d * d / (4.0 * tau * tau) - k * k);
                Ok((value, d_rho.abs(), d_tau))
            }
            _ => {
                let value = (4.0 * PI * tau).powf(-0.5 * n) * (-d * d / (4.0 * tau)).exp();
                Ok((value, value * d / (2.0 * tau), value * (-0.5 * n / tau + d * d / (4.0 * tau * tau))))
            }
        }
    }

    /// Value only; the cheap path used by level-set root finding.
    pub fn value(&self, rho: f64, tau: f64) -> Result<f64> {
        match self.kind {
            KernelKind::Heat => Ok(self.heat_kernel(rho, tau)?.0),
            KernelKind::SubHeat => self.field().sub_heat_value(rho, tau),
            _ => Ok(self.green_value(rho)?.0),
        }
    }

    fn field(&self) -> &ReducedDistanceField {
        self.reduced.as_deref().expect("sub-heat kernels carry a reduced-distance field")
    }

    /// Value, radial derivative (non-positive) and fixed-point `τ`-derivative.
    pub fn sample(&self, rho: f64, tau: f64) -> Result<KernelSample> {
        match self.kind {
            KernelKind::Heat => {
                let (value, grad, d_tau) = self.heat_kernel(rho, tau)?;
                Ok(KernelSample { value, d_rho: -grad, d_tau })
            }
            KernelKind::SubHeat => self.sub_heat_kernel(rho, tau),
            _ => {
                let (value, grad) = self.green_value(rho)?;
                Ok(KernelSample { value, d_rho: -grad, d_tau: 0.0 })
            }
        }
    }

    /// `K̂` with derivatives from central differences of `ℓ`.
    pub fn sub_heat_kernel(&self, rho: f64, tau: f64) -> Result<KernelSample> {
        if self.kind != KernelKind::SubHeat {
            return unsupported("sub_heat_kernel needs the sub-heat kind");
        }
        let n = self.dimension() as f64;
        let jet = self.field().jet(rho, tau, crate::numerics::FD_STEP)?;
        let value = (4.0 * PI * tau).powf(-0.5 * n) * (-jet.ell).exp();
        Ok(KernelSample { value, d_rho: -jet.ell_rho * value, d_tau: (-0.5 * n / tau - jet.ell_tau) * value })
    }

    /// `|∇ log u|² − ∂τ log u` for a parabolic kernel.
    pub fn harnack_q(&self, rho: f64, tau: f64) -> Result<f64> {
        if !self.kind.is_parabolic() {
            return unsupported("Harnack expression needs a parabolic kernel");
        }
        if !(tau > 0.0) {
            return range(format!("tau must be positive, got {tau}"));
        }
        Ok(self.sample(rho, tau)?.harnack_q())
    }

    /// Finite-difference `(∂τ − Δ + R)u` at `(ρ, τ)`; zero for exact heat
    /// kernels on static models and non-positive for `K̂`.
    pub fn conjugate_heat_residual(&self, rho: f64, tau: f64, h: f64) -> Result<f64> {
        if !self.kind.is_parabolic() {
            return unsupported("conjugate heat residual needs a parabolic kernel");
        }
        let g = &self.geom;
        let t = -tau;
        let hr = h * rho.max(1.0);
        let u0 = self.value(rho, tau)?;
        let up = self.value(rho + hr, tau)?;
        let um = self.value((rho - hr).abs(), tau)?;
        let u_rr = (up - 2.0 * u0 + um) / (hr * hr);
        let w = g.warp(rho, t);
        let n = self.dimension() as f64;
        let radial = if rho == 0.0 { n * u_rr } else { u_rr + (n - 1.0) * w.dphi / w.phi * (up - um) / (2.0 * hr) };
        let x = g.comoving(rho, t);
        let ht = h * tau;
        let u_tau = (self.value(g.radius_of(x, -(tau + ht)), tau + ht)? - self.value(g.radius_of(x, -(tau - ht)), tau - ht)?)
            / (2.0 * ht);
        Ok(u_tau - radial + g.r_trace(rho, t) * u0)
    }
}

/// Ambient Gaussian `(4πτ)^{-n/2} exp(−|x₀−y|²/4τ)` with intrinsic
/// normalization `n`.
pub fn mcf_sup_heat_kernel(x0: &[f64], y: &[f64], tau: f64, n: usize) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(MvError::Range(format!("tau must be positive, got {tau}")));
    }
    if x0.len() != y.len() {
        return Err(MvError::Range("points live in different ambient spaces".into()));
    }
    let d2: f64 = x0.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((4.0 * PI * tau).powf(-0.5 * n as f64) * (-d2 / (4.0 * tau)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_green() {
        let g = Kernel::exact_green(FlowGeometry::euclidean(3)).unwrap();
        let (v, grad) = g.green_value(0.5).unwrap();
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((grad - 1.0 / PI).abs() < 1e-15);
        assert!(matches!(g.green_value(0.0), Err(MvError::Range(_))));
        assert!(matches!(Kernel::exact_green(FlowGeometry::euclidean(2)), Err(MvError::Unsupported(_))));
    }

    #[test]
    fn sub_green_pole_asymptotic() {
        let h = FlowGeometry::hyperbolic(3, 1.0).unwrap();
        let g = Kernel::sub_green(h, 1.0).unwrap();
        let v = g.green_value(1e-7).unwrap().0;
        assert!((v * 4.0 * PI * 1e-7 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sub_green_quadrature_matches_closed_form() {
        // n = 4 has no closed form here; compare G' with -1/(A φ³) and the
        // n = 3 closed form with its own tail integral
        let h3 = FlowGeometry::hyperbolic(3, 1.5).unwrap();
        let g3 = Kernel::sub_green(h3, 1.5).unwrap();
        let tail = Integrator::new(Tolerance::new(1e-15, 1e-13))
            .integrate_to_infinity(|s| Ok(1.0 / (4.0 * PI * space_form_warp(1.5, s).powi(2))), 0.8)
            .unwrap();
        assert!((g3.green_value(0.8).unwrap().0 - tail.value).abs() < 1e-12);
        let g4 = Kernel::sub_green(FlowGeometry::hyperbolic(4, 1.0).unwrap(), 1.0).unwrap();
        let hstep = 1e-5;
        let d = (g4.green_value(0.7 + hstep).unwrap().0 - g4.green_value(0.7 - hstep).unwrap().0) / (2.0 * hstep);
        assert!((d + g4.green_value(0.7).unwrap().1).abs() < 1e-7);
    }

    #[test]
    fn sup_green_is_euclidean_form() {
        let g = Kernel::sup_green(FlowGeometry::hyperbolic(3, 1.0).unwrap()).unwrap();
        assert!((g.green_value(1.0).unwrap().0 - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn heat_values() {
        let e2 = Kernel::heat(FlowGeometry::euclidean(2)).unwrap();
        assert!((e2.heat_kernel(0.0, 0.25).unwrap().0 - 1.0 / PI).abs() < 1e-15);
        let h3 = Kernel::heat(FlowGeometry::hyperbolic(3, 1.0).unwrap()).unwrap();
        assert!((h3.heat_kernel(1.0, 0.5).unwrap().0 - 1.9877e-2).abs() < 1e-5);
        assert!(e2.heat_kernel(1.0, 0.0).is_err());
        assert!(Kernel::heat(FlowGeometry::hyperbolic(2, 1.0).unwrap()).is_err());
    }

    #[test]
    fn heat_equation_residuals() {
        let e3 = Kernel::heat(FlowGeometry::euclidean(3)).unwrap();
        let h3 = Kernel::heat(FlowGeometry::hyperbolic(3, 1.0).unwrap()).unwrap();
        for (d, tau) in [(0.3, 0.2), (1.0, 0.5), (2.0, 1.5)] {
            let v = e3.value(d, tau).unwrap();
            assert!(e3.conjugate_heat_residual(d, tau, 1e-4).unwrap().abs() <= 1e-6 * v.max(1.0));
            assert!(h3.conjugate_heat_residual(d, tau, 1e-4).unwrap().abs() <= 1e-6);
        }
    }

    #[test]
    fn harnack_on_gaussian() {
        let e2 = Kernel::heat(FlowGeometry::euclidean(2)).unwrap();
        for d in [0.0, 0.4, 1.3] {
            assert!((e2.harnack_q(d, 0.25).unwrap() - 4.0).abs() < 1e-10);
        }
        let e3 = Kernel::heat(FlowGeometry::euclidean(3)).unwrap();
        assert!((e3.harnack_q(0.7, 0.5).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn sub_heat_on_flat_soliton() {
        let k = Kernel::new(KernelKind::SubHeat, FlowGeometry::gaussian_soliton(2)).unwrap();
        let s = k.sub_heat_kernel(1.0, 0.25).unwrap();
        assert!((s.value - (-1f64).exp() / PI).abs() < 1e-10);
        assert!((k.sub_heat_kernel(0.0, 0.25).unwrap().value - 1.0 / PI).abs() < 1e-12);
        assert!((s.harnack_q() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn mcf_kernel_values() {
        let v = mcf_sup_heat_kernel(&[0.0, 0.0], &[1.0, 1.0], 1.0, 1).unwrap();
        assert!((v - (4.0 * PI).powf(-0.5) * (-0.5f64).exp()).abs() < 1e-15);
        let v = mcf_sup_heat_kernel(&[0.0; 3], &[0.0; 3], 1.0, 2).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let a = mcf_sup_heat_kernel(&[0.0, 0.0], &[0.3, 0.4], 0.7, 1).unwrap();
        let b = mcf_sup_heat_kernel(&[0.0, 0.0], &[0.6, 0.8], 2.8, 1).unwrap();
        assert!((b - a / 2.0).abs() < 1e-15);
        assert!(mcf_sup_heat_kernel(&[0.0], &[0.0], -1.0, 1).is_err());
    }
}
