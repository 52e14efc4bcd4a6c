//! Rotationally symmetric model geometries and flows.
//!
//! Every model is a homothetic family `g(t) = c(t) ĝ` of a warped product
//! `ĝ = dx² + f(x)² g_{S^{n-1}}`, so the geodesic radius from the pole is
//! `ρ = √c(t) x` and the warp is `φ(ρ, t) = √c f(ρ/√c)`. The comoving
//! coordinate `x` labels a fixed spatial point across time, which is what
//! time derivatives "at a fixed point" refer to throughout the crate.
//!
//! The space-time metric is `g̃ = g(t) + dt²` with index 0 the time
//! direction.

use nalgebra::DMatrix;

use crate::error::{range, unsupported, MvError, Result};
use crate::numerics::unit_sphere_area;

/// Guard kept between the shrinking sphere's singular time and the usable
/// time interval.
pub const SINGULAR_TIME_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryKind {
    /// Flat `R^n`, static.
    Euclidean,
    /// Static space form of sectional curvature `-k²`.
    Hyperbolic { k: f64 },
    /// Round sphere shrinking under Ricci flow, `c(t) = 1 - 2(n-1)t`.
    ShrinkingSphere,
    /// Flat `R^n` viewed as the Gaussian shrinking soliton.
    GaussianSoliton,
}

/// A point in space-time: geodesic radius from the pole at time `t`, plus an
/// optional unit direction used only by non-radial integrands.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimePoint {
    pub rho: f64,
    pub direction: Option<Vec<f64>>,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(rho: f64, t: f64) -> Self {
        Self { rho, direction: None, t }
    }

    pub fn with_direction(rho: f64, direction: Vec<f64>, t: f64) -> Self {
        let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        Self { rho, direction: Some(direction.into_iter().map(|d| d / norm).collect()), t }
    }
}

/// `R = tr Υ` together with the two distinct Ricci eigenvalues of `g(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature {
    pub r: f64,
    pub ric_radial: f64,
    pub ric_tangential: f64,
}

/// Warp function and its first two `ρ`-derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Warp {
    pub phi: f64,
    pub dphi: f64,
    pub ddphi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowGeometry {
    dim: usize,
    kind: GeometryKind,
}

impl FlowGeometry {
    pub fn new(dim: usize, kind: GeometryKind) -> Result<Self> {
        if dim == 0 {
            return range("dimension must be at least 1");
        }
        match kind {
            GeometryKind::Hyperbolic { k } if !(k > 0.0 && k.is_finite()) => {
                range(format!("hyperbolic curvature parameter must be positive, got {k}"))
            }
            GeometryKind::ShrinkingSphere if dim < 2 => unsupported("shrinking sphere needs n >= 2"),
            _ => Ok(Self { dim, kind }),
        }
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(dim, GeometryKind::Euclidean).expect("valid")
    }

    pub fn hyperbolic(dim: usize, k: f64) -> Result<Self> {
        Self::new(dim, GeometryKind::Hyperbolic { k })
    }

    pub fn shrinking_sphere(dim: usize) -> Result<Self> {
        Self::new(dim, GeometryKind::ShrinkingSphere)
    }

    pub fn gaussian_soliton(dim: usize) -> Self {
        Self::new(dim, GeometryKind::GaussianSoliton).expect("valid")
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn is_static(&self) -> bool {
        !matches!(self.kind, GeometryKind::ShrinkingSphere)
    }

    /// Ricci-flow kinds evolve with `Υ = Ric`; static kinds have `Υ = 0`.
    pub fn is_ricci_flow(&self) -> bool {
        matches!(self.kind, GeometryKind::ShrinkingSphere | GeometryKind::GaussianSoliton)
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, GeometryKind::Euclidean | GeometryKind::GaussianSoliton)
    }

    /// Open time interval on which the geometry is defined.
    pub fn time_interval(&self) -> (f64, f64) {
        match self.kind {
            GeometryKind::ShrinkingSphere => {
                (f64::NEG_INFINITY, 1.0 / (2.0 * (self.dim as f64 - 1.0)) - SINGULAR_TIME_MARGIN)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.time_interval();
        if !(t > lo && t < hi) {
            return range(format!("time {t} outside ({lo}, {hi})"));
        }
        Ok(())
    }

    /// Conformal factor `c(t)` with `g(t) = c(t) ĝ`.
    pub fn scale_sq(&self, t: f64) -> f64 {
        match self.kind {
            GeometryKind::ShrinkingSphere => 1.0 - 2.0 * (self.dim as f64 - 1.0) * t,
            _ => 1.0,
        }
    }

    /// `dc/dt`.
    pub fn scale_sq_rate(&self, _t: f64) -> f64 {
        match self.kind {
            GeometryKind::ShrinkingSphere => -2.0 * (self.dim as f64 - 1.0),
            _ => 0.0,
        }
    }

    /// Model warp `f(x)` of `ĝ` with derivatives `f'`, `f''`, `f'''`.
    pub fn model_warp(&self, x: f64) -> [f64; 4] {
        match self.kind {
            GeometryKind::Euclidean | GeometryKind::GaussianSoliton => [x, 1.0, 0.0, 0.0],
            GeometryKind::Hyperbolic { k } => {
                let (s, c) = ((k * x).sinh(), (k * x).cosh());
                [s / k, c, k * s, k * k * c]
            }
            GeometryKind::ShrinkingSphere => [x.sin(), x.cos(), -x.sin(), -x.cos()],
        }
    }

    /// Largest geodesic radius from the pole at time `t`.
    pub fn rho_max(&self, t: f64) -> f64 {
        match self.kind {
            GeometryKind::ShrinkingSphere => std::f64::consts::PI * self.scale_sq(t).sqrt(),
            _ => f64::INFINITY,
        }
    }

    pub fn check_point(&self, rho: f64, t: f64) -> Result<()> {
        self.check_time(t)?;
        let max = self.rho_max(t);
        if !(rho >= 0.0 && rho < max) {
            return range(format!("rho {rho} outside [0, {max}) at t = {t}"));
        }
        Ok(())
    }

    /// Comoving coordinate of the point at geodesic radius `rho` and time `t`.
    pub fn comoving(&self, rho: f64, t: f64) -> f64 {
        rho / self.scale_sq(t).sqrt()
    }

    /// Geodesic radius at time `t` of the fixed point with comoving coordinate `x`.
    pub fn radius_of(&self, x: f64, t: f64) -> f64 {
        x * self.scale_sq(t).sqrt()
    }

    /// `φ(ρ, t)` and its `ρ`-derivatives.
    pub fn warp(&self, rho: f64, t: f64) -> Warp {
        let lam = self.scale_sq(t).sqrt();
        let [f, df, ddf, _] = self.model_warp(rho / lam);
        Warp { phi: lam * f, dphi: df, ddphi: ddf / lam }
    }

    /// Area of the geodesic sphere of radius `rho` at time `t`.
    pub fn sphere_area(&self, rho: f64, t: f64) -> Result<f64> {
        self.check_point(rho, t)?;
        if rho == 0.0 {
            return range("sphere area needs rho > 0");
        }
        Ok(self.sphere_area_unchecked(rho, t))
    }

    pub(crate) fn sphere_area_unchecked(&self, rho: f64, t: f64) -> f64 {
        unit_sphere_area(self.dim - 1) * self.warp(rho, t).phi.powi(self.dim as i32 - 1)
    }

    /// Ricci eigenvalues `(radial, tangential)` of `g(t)` at radius `rho`.
    pub fn ricci(&self, rho: f64, t: f64) -> (f64, f64) {
        let n = self.dim as f64;
        let w = self.warp(rho, t);
        if w.phi.abs() < 1e-6 {
            // pole limit: sectional curvature -f'''(0)/c
            let k = -self.model_warp(0.0)[3] / self.scale_sq(t);
            return ((n - 1.0) * k, (n - 1.0) * k);
        }
        let radial = -(n - 1.0) * w.ddphi / w.phi;
        let tangential = -w.ddphi / w.phi + (n - 2.0) * (1.0 - w.dphi * w.dphi) / (w.phi * w.phi);
        (radial, tangential)
    }

    /// Eigenvalues `(radial, tangential)` of the evolution tensor `Υ`.
    pub fn upsilon(&self, rho: f64, t: f64) -> (f64, f64) {
        if self.is_ricci_flow() {
            self.ricci(rho, t)
        } else {
            (0.0, 0.0)
        }
    }

    /// `R = g^{ij} Υ_ij`.
    pub fn r_trace(&self, rho: f64, t: f64) -> f64 {
        let (rad, tan) = self.upsilon(rho, t);
        rad + (self.dim as f64 - 1.0) * tan
    }

    /// `∂R/∂x` in the comoving coordinate at fixed time.
    pub fn r_trace_comoving_gradient(&self, x: f64, t: f64) -> f64 {
        // every model has constant curvature in space
        let _ = (x, t);
        0.0
    }

    /// `∂R/∂t` at a fixed point. Every model has `R ∝ 1/c(t)`.
    pub fn r_trace_rate(&self, rho: f64, t: f64) -> f64 {
        -self.r_trace(rho, t) * self.scale_sq_rate(t) / self.scale_sq(t)
    }

    /// Distance from the pole, in comoving units, of the point reached by
    /// travelling a signed comoving arc length `x` along a radial geodesic.
    /// The second component is `true` when the arrival direction points back
    /// towards the pole.
    pub fn fold_comoving(&self, x: f64) -> (f64, bool) {
        use std::f64::consts::PI;
        match self.kind {
            GeometryKind::ShrinkingSphere => {
                let m = x.rem_euclid(2.0 * PI);
                if m > PI {
                    (2.0 * PI - m, true)
                } else {
                    (m, false)
                }
            }
            _ => (x.abs(), x < 0.0),
        }
    }

    /// All signed comoving arc lengths in `[lo, hi]` whose fold is `target`.
    pub fn comoving_lifts(&self, target: f64, lo: f64, hi: f64) -> Vec<f64> {
        use std::f64::consts::PI;
        let mut lifts = Vec::new();
        match self.kind {
            GeometryKind::ShrinkingSphere => {
                let first = ((lo - PI) / (2.0 * PI)).floor() as i64;
                let last = ((hi + PI) / (2.0 * PI)).ceil() as i64;
                for m in first..=last {
                    let base = 2.0 * PI * m as f64;
                    for cand in [base + target, base - target] {
                        if cand >= lo && cand <= hi && !lifts.contains(&cand) {
                            lifts.push(cand);
                        }
                    }
                }
            }
            _ => {
                for cand in [target, -target] {
                    if cand >= lo && cand <= hi && !lifts.contains(&cand) {
                        lifts.push(cand);
                    }
                }
            }
        }
        lifts.sort_by(f64::total_cmp);
        lifts
    }

    pub fn curvature(&self, p: &SpaceTimePoint) -> Result<Curvature> {
        self.check_point(p.rho, p.t)?;
        let (ric_radial, ric_tangential) = self.ricci(p.rho, p.t);
        Ok(Curvature { r: self.r_trace(p.rho, p.t), ric_radial, ric_tangential })
    }

    /// Largest componentwise `|∂t g + 2Υ|` (orthonormal frame) over the
    /// samples, with `∂t g` by central differences at fixed comoving points.
    pub fn flow_residual(&self, samples: &[SpaceTimePoint], h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return range("step must be positive");
        }
        let mut worst: f64 = 0.0;
        for p in samples {
            self.check_point(p.rho, p.t)?;
            self.check_time(p.t - h)?;
            self.check_time(p.t + h)?;
            let x = self.comoving(p.rho, p.t);
            let radial = |t: f64| self.scale_sq(t);
            let angular = |t: f64| self.scale_sq(t) * self.model_warp(x)[0].powi(2);
            let d_rad = (radial(p.t + h) - radial(p.t - h)) / (2.0 * h);
            let d_ang = (angular(p.t + h) - angular(p.t - h)) / (2.0 * h);
            let (u_rad, u_tan) = self.upsilon(p.rho, p.t);
            let res_rad = (d_rad + 2.0 * u_rad * radial(p.t)).abs() / radial(p.t);
            let res_ang = if self.dim > 1 {
                (d_ang + 2.0 * u_tan * angular(p.t)).abs() / angular(p.t)
            } else {
                0.0
            };
            worst = worst.max(res_rad).max(res_ang);
        }
        Ok(worst)
    }

    fn comoving_cartesian(&self, p: &SpaceTimePoint) -> Result<Vec<f64>> {
        self.check_point(p.rho, p.t)?;
        if p.rho <= 0.0 {
            return range("space-time tensors are evaluated off the pole");
        }
        let x = self.comoving(p.rho, p.t);
        let mut y = vec![0.0; self.dim];
        match &p.direction {
            Some(u) if u.len() == self.dim => {
                for (yi, ui) in y.iter_mut().zip(u) {
                    *yi = x * ui;
                }
            }
            Some(u) => return range(format!("direction has {} components, expected {}", u.len(), self.dim)),
            None => y[0] = x,
        }
        Ok(y)
    }

    /// Coefficients of `g_ij = a δ_ij + b y_i y_j` in comoving Cartesian
    /// coordinates, with their derivatives in `x = |y|`.
    fn cartesian_coeffs(&self, x: f64, t: f64) -> (f64, f64, f64, f64) {
        let c = self.scale_sq(t);
        let [f, df, _, _] = self.model_warp(x);
        let a = c * f * f / (x * x);
        let b = (c - a) / (x * x);
        let da = c * (2.0 * f * df / (x * x) - 2.0 * f * f / (x * x * x));
        let db = -da / (x * x) - 2.0 * (c - a) / (x * x * x);
        (a, b, da, db)
    }

    fn spatial_metric(&self, y: &[f64], t: f64) -> DMatrix<f64> {
        let n = self.dim;
        let x = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (a, b, _, _) = self.cartesian_coeffs(x, t);
        DMatrix::from_fn(n, n, |i, j| if i == j { a } else { 0.0 } + b * y[i] * y[j])
    }

    /// Full space-time metric `g̃` with index 0 the time direction.
    pub fn spacetime_metric(&self, y: &[f64], t: f64) -> DMatrix<f64> {
        let n = self.dim;
        let g = self.spatial_metric(y, t);
        DMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (0, _) | (_, 0) => 0.0,
            _ => g[(i - 1, j - 1)],
        })
    }

    /// Analytic spatial Christoffel symbols `Γ^l_ij` and `Υ_ij` at `y`.
    fn spatial_connection(&self, y: &[f64], t: f64) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
        let n = self.dim;
        let x = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (a, b, da, db) = self.cartesian_coeffs(x, t);
        let g = self.spatial_metric(y, t);
        let ginv = g.clone().try_inverse().expect("metric is positive definite");
        // ∂_m g_ij
        let dg = |m: usize, i: usize, j: usize| {
            let ym = y[m] / x;
            let delta = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
            da * ym * delta(i, j) + db * ym * y[i] * y[j] + b * (delta(m, i) * y[j] + delta(m, j) * y[i])
        };
        let mut gamma = vec![0.0; n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += ginv[(l, k)] * (dg(i, k, j) + dg(j, k, i) - dg(k, i, j));
                    }
                    gamma[(l * n + i) * n + j] = 0.5 * s;
                }
            }
        }
        let c = self.scale_sq(t);
        let rho = self.radius_of(x, t);
        let (u_rad, u_tan) = self.upsilon(rho, t);
        let upsilon = DMatrix::from_fn(n, n, |i, j| {
            let yy = y[i] * y[j] / (x * x);
            let delta = if i == j { 1.0 } else { 0.0 };
            u_rad * c * yy + u_tan * a * (delta - yy)
        });
        (gamma, upsilon, ginv)
    }

    /// Space-time Christoffel symbols of `g̃` assembled from the spatial
    /// connection and `Υ`.
    pub fn spacetime_christoffels(&self, p: &SpaceTimePoint) -> Result<Christoffels> {
        let y = self.comoving_cartesian(p)?;
        let n = self.dim;
        let (gamma, upsilon, ginv) = self.spatial_connection(&y, p.t);
        let mixed = -(&ginv * &upsilon); // Υ^i_k raised with g^{-1}
        let mut out = Christoffels::zeros(n + 1);
        for i in 0..n {
            for j in 0..n {
                out.set(0, i + 1, j + 1, upsilon[(i, j)]);
                out.set(i + 1, 0, j + 1, mixed[(i, j)]);
                out.set(i + 1, j + 1, 0, mixed[(i, j)]);
                for l in 0..n {
                    out.set(l + 1, i + 1, j + 1, gamma[(l * n + i) * n + j]);
                }
            }
        }
        Ok(out)
    }

    /// Christoffel symbols of `g̃` from central differences of its
    /// components; independent of [`Self::spacetime_christoffels`].
    pub fn spacetime_christoffels_fd(&self, p: &SpaceTimePoint, h: f64) -> Result<Christoffels> {
        let y = self.comoving_cartesian(p)?;
        self.check_time(p.t - h)?;
        self.check_time(p.t + h)?;
        let dim = self.dim + 1;
        let at = |shift: usize, s: f64| {
            let mut yy = y.clone();
            let mut tt = p.t;
            if shift == 0 {
                tt += s;
            } else {
                yy[shift - 1] += s;
            }
            self.spacetime_metric(&yy, tt)
        };
        let dg: Vec<DMatrix<f64>> = (0..dim).map(|a| (at(a, h) - at(a, -h)) / (2.0 * h)).collect();
        let ginv = self
            .spacetime_metric(&y, p.t)
            .try_inverse()
            .ok_or_else(|| MvError::Range("degenerate metric".into()))?;
        let mut out = Christoffels::zeros(dim);
        for c in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    let mut s = 0.0;
                    for d in 0..dim {
                        s += ginv[(c, d)] * (dg[a][(d, b)] + dg[b][(d, a)] - dg[d][(a, b)]);
                    }
                    out.set(c, a, b, 0.5 * s);
                }
            }
        }
        Ok(out)
    }

    /// Space-time divergence `div X − X⁰R + ∂t X⁰` of `X̃ = X + X⁰ ∂t`.
    pub fn spacetime_divergence(&self, field: &dyn SpaceTimeVectorField, p: &SpaceTimePoint) -> Result<f64> {
        let y = self.comoving_cartesian(p)?;
        let n = self.dim;
        let (gamma, _, _) = self.spatial_connection(&y, p.t);
        let (x_spatial, x0) = field.eval(&y, p.t);
        let (div_partial, dt_x0) = field.derivatives(&y, p.t, crate::numerics::FD_STEP);
        // ∂_i log √det g = Γ^j_{ji}
        let mut transport = 0.0;
        for i in 0..n {
            let trace: f64 = (0..n).map(|j| gamma[(j * n + j) * n + i]).sum();
            transport += x_spatial[i] * trace;
        }
        let r = self.r_trace(p.rho, p.t);
        Ok(div_partial + transport - x0 * r + dt_x0)
    }

    /// Divergence of `X̃` with respect to `g̃` from central differences of
    /// `√det g̃ X^A`; the oracle for [`Self::spacetime_divergence`].
    pub fn spacetime_divergence_fd(&self, field: &dyn SpaceTimeVectorField, p: &SpaceTimePoint, h: f64) -> Result<f64> {
        let y = self.comoving_cartesian(p)?;
        self.check_time(p.t - h)?;
        self.check_time(p.t + h)?;
        let n = self.dim;
        let density = |yy: &[f64], tt: f64| self.spacetime_metric(yy, tt).determinant().sqrt();
        let component = |a: usize, yy: &[f64], tt: f64| {
            let (xs, x0) = field.eval(yy, tt);
            density(yy, tt) * if a == 0 { x0 } else { xs[a - 1] }
        };
        let mut s = 0.0;
        for a in 0..=n {
            let (mut yp, mut ym) = (y.clone(), y.clone());
            let (mut tp, mut tm) = (p.t, p.t);
            if a == 0 {
                tp += h;
                tm -= h;
            } else {
                yp[a - 1] += h;
                ym[a - 1] -= h;
            }
            s += (component(a, &yp, tp) - component(a, &ym, tm)) / (2.0 * h);
        }
        Ok(s / density(&y, p.t))
    }
}

/// Christoffel symbols `Γ^C_AB` of an `(n+1)`-dimensional metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffels {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffels {
    fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^c_{ab}`.
    pub fn get(&self, c: usize, a: usize, b: usize) -> f64 {
        self.data[(c * self.dim + a) * self.dim + b]
    }

    fn set(&mut self, c: usize, a: usize, b: usize, v: f64) {
        self.data[(c * self.dim + a) * self.dim + b] = v;
    }

    pub fn max_abs_diff(&self, other: &Christoffels) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// A time-dependent vector field `X̃ = X + X⁰ ∂t` in comoving Cartesian
/// coordinates.
pub trait SpaceTimeVectorField {
    /// Spatial components `X^i` and time component `X⁰`.
    fn eval(&self, y: &[f64], t: f64) -> (Vec<f64>, f64);

    /// `(Σ_i ∂_i X^i, ∂_t X⁰)`; central differences unless overridden.
    fn derivatives(&self, y: &[f64], t: f64, h: f64) -> (f64, f64) {
        let mut div = 0.0;
        for i in 0..y.len() {
            let (mut yp, mut ym) = (y.to_vec(), y.to_vec());
            yp[i] += h;
            ym[i] -= h;
            div += (self.eval(&yp, t).0[i] - self.eval(&ym, t).0[i]) / (2.0 * h);
        }
        let dt = (self.eval(y, t + h).1 - self.eval(y, t - h).1) / (2.0 * h);
        (div, dt)
    }
}

/// Smooth, non-radial space-time field `X^i = y_i(1 + t/2) + y_{i+1}²/5`,
/// `X⁰ = 1 + 0.3|y|² + t/10`, used to probe the divergence formula.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProbeField;

impl SpaceTimeVectorField for ProbeField {
    fn eval(&self, y: &[f64], t: f64) -> (Vec<f64>, f64) {
        let n = y.len();
        let spatial = (0..n).map(|i| y[i] * (1.0 + 0.5 * t) + 0.2 * y[(i + 1) % n].powi(2)).collect();
        let sq: f64 = y.iter().map(|c| c * c).sum();
        (spatial, 1.0 + 0.3 * sq + 0.1 * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    struct TimeField;
    impl SpaceTimeVectorField for TimeField {
        fn eval(&self, y: &[f64], _t: f64) -> (Vec<f64>, f64) {
            (vec![0.0; y.len()], 1.0)
        }
    }

    struct EulerField;
    impl SpaceTimeVectorField for EulerField {
        fn eval(&self, y: &[f64], _t: f64) -> (Vec<f64>, f64) {
            (y.to_vec(), 0.0)
        }
    }

    #[test]
    fn shrinking_sphere_curvature() {
        let g = FlowGeometry::shrinking_sphere(2).unwrap();
        let c = g.curvature(&SpaceTimePoint::new(0.7, 0.0)).unwrap();
        assert!((c.r - 2.0).abs() < 1e-12);
        let c = g.curvature(&SpaceTimePoint::new(0.7, 0.2)).unwrap();
        assert!((c.r - 2.0 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn static_kinds_have_zero_trace() {
        let e = FlowGeometry::euclidean(3);
        assert_eq!(e.curvature(&SpaceTimePoint::new(1.3, 4.0)).unwrap().r, 0.0);
        let h = FlowGeometry::hyperbolic(3, 1.0).unwrap();
        let c = h.curvature(&SpaceTimePoint::new(1.0, 0.0)).unwrap();
        assert_eq!(c.r, 0.0);
        assert!((c.ric_radial + 2.0).abs() < 1e-12 && (c.ric_tangential + 2.0).abs() < 1e-12);
    }

    #[test]
    fn domain_violations() {
        let s = FlowGeometry::shrinking_sphere(3).unwrap();
        assert!(matches!(s.curvature(&SpaceTimePoint::new(4.0, 0.0)), Err(MvError::Range(_))));
        assert!(matches!(s.curvature(&SpaceTimePoint::new(0.5, 0.3)), Err(MvError::Range(_))));
        assert!(FlowGeometry::shrinking_sphere(1).is_err());
        assert!(FlowGeometry::hyperbolic(3, -1.0).is_err());
    }

    #[test]
    fn flow_residuals() {
        let s = FlowGeometry::shrinking_sphere(3).unwrap();
        let samples: Vec<_> = (0..20)
            .map(|i| SpaceTimePoint::new(0.1 + 0.09 * i as f64, -0.5 + 0.03 * i as f64))
            .collect();
        assert!(s.flow_residual(&samples, 1e-4).unwrap() <= 1e-7);
        let e = FlowGeometry::euclidean(3);
        assert_eq!(e.flow_residual(&samples, 1e-4).unwrap(), 0.0);
        let h = FlowGeometry::hyperbolic(3, 1.0).unwrap();
        assert_eq!(h.flow_residual(&samples, 1e-4).unwrap(), 0.0);
        let edge = [SpaceTimePoint::new(0.5, 0.249)];
        assert!(s.flow_residual(&edge, 1e-2).is_err());
    }

    #[test]
    fn sphere_areas() {
        let e = FlowGeometry::euclidean(3);
        assert!((e.sphere_area(1.0, 0.0).unwrap() - 4.0 * PI).abs() < 1e-12);
        let h = FlowGeometry::hyperbolic(3, 1.0).unwrap();
        assert!((h.sphere_area(1.0, 0.0).unwrap() - 17.3554).abs() < 1e-4);
        let s = FlowGeometry::shrinking_sphere(2).unwrap();
        assert!((s.sphere_area(PI / 2.0, 0.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!(s.sphere_area(4.0, 0.0).is_err());
    }

    #[test]
    fn smooth_pole() {
        for g in [
            FlowGeometry::euclidean(3),
            FlowGeometry::hyperbolic(3, 2.0).unwrap(),
            FlowGeometry::shrinking_sphere(3).unwrap(),
        ] {
            for t in [-0.3, 0.0, 0.1] {
                for rho in [1e-6, 1e-5, 1e-4] {
                    let w = g.warp(rho, t);
                    assert!((w.phi / rho - 1.0).abs() <= 1e-8);
                }
                assert_eq!(g.warp(0.0, t).phi, 0.0);
                assert!((g.warp(0.0, t).dphi - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn christoffel_time_components() {
        let e = FlowGeometry::euclidean(3);
        let g = e.spacetime_christoffels(&SpaceTimePoint::new(0.8, 0.0)).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(g.get(0, a, b), 0.0);
                if a == 0 || b == 0 {
                    for c in 0..4 {
                        assert_eq!(g.get(c, a, b), 0.0);
                    }
                }
            }
        }
        // unit S² at t = 0: Γ̃⁰_ij = Ric_ij = g_ij; orthonormal radial direction
        let s = FlowGeometry::shrinking_sphere(2).unwrap();
        let g = s.spacetime_christoffels(&SpaceTimePoint::new(0.6, 0.0)).unwrap();
        assert!((g.get(0, 1, 1) - 1.0).abs() < 1e-12, "{}", g.get(0, 1, 1));
        assert_eq!(g.get(0, 0, 0), 0.0);
    }

    #[test]
    fn christoffels_match_finite_differences() {
        for g in [
            FlowGeometry::euclidean(3),
            FlowGeometry::hyperbolic(3, 1.0).unwrap(),
            FlowGeometry::shrinking_sphere(3).unwrap(),
            FlowGeometry::shrinking_sphere(2).unwrap(),
        ] {
            let p = SpaceTimePoint::with_direction(0.9, vec![0.3, -0.5, 0.8][..g.dimension()].to_vec(), -0.1);
            let a = g.spacetime_christoffels(&p).unwrap();
            let b = g.spacetime_christoffels_fd(&p, 1e-4).unwrap();
            assert!(a.max_abs_diff(&b) <= 1e-6, "{:?}: {}", g.kind(), a.max_abs_diff(&b));
        }
    }

    #[test]
    fn divergence_examples() {
        let s = FlowGeometry::shrinking_sphere(2).unwrap();
        let d = s.spacetime_divergence(&TimeField, &SpaceTimePoint::new(0.5, 0.0)).unwrap();
        assert!((d + 2.0).abs() < 1e-12);
        let e = FlowGeometry::euclidean(3);
        assert_eq!(e.spacetime_divergence(&TimeField, &SpaceTimePoint::new(0.5, 0.0)).unwrap(), 0.0);
        let d = e.spacetime_divergence(&EulerField, &SpaceTimePoint::new(0.5, 0.0)).unwrap();
        assert!((d - 3.0).abs() < 1e-8);
        for g in [
            FlowGeometry::euclidean(2),
            FlowGeometry::hyperbolic(3, 1.0).unwrap(),
            FlowGeometry::shrinking_sphere(3).unwrap(),
            FlowGeometry::gaussian_soliton(3),
        ] {
            let p = SpaceTimePoint::with_direction(0.7, vec![0.6, 0.8, 0.0][..g.dimension()].to_vec(), -0.2);
            let a = g.spacetime_divergence(&ProbeField, &p).unwrap();
            let b = g.spacetime_divergence_fd(&ProbeField, &p, 1e-4).unwrap();
            assert!((a - b).abs() <= 1e-6, "{:?}: {a} vs {b}", g.kind());
        }
    }
}
