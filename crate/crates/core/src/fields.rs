//! Analytic test functions with exact Laplacians, time derivatives and
//! spherical means over geodesic spheres about the pole.
//!
//! Points are given in geodesic normal coordinates `y = ρ u` about the pole
//! (Cartesian coordinates on the Euclidean model) at forward time `t`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{unsupported, MvError, Result};
use crate::geometry::{FlowGeometry, GeometryKind};
use crate::numerics::gauss_legendre;

/// Constant of the superharmonic field `C − d²`.
pub const SUPERHARMONIC_CONSTANT: f64 = 10.0;
/// Distance of the singularity of the `power` field from the pole.
pub const POWER_POLE: f64 = 2.0;
/// The `gaussian-translate` field is the heat kernel started at time `-t₁`.
pub const GAUSSIAN_SOURCE_TIME: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldName {
    Constant,
    Linear,
    HarmonicQuadratic,
    Power,
    Subharmonic,
    Superharmonic,
    CaloricQuadratic,
    GaussianTranslate,
    ExpRadial,
}

impl FieldName {
    pub const ALL: [FieldName; 9] = [
        FieldName::Constant,
        FieldName::Linear,
        FieldName::HarmonicQuadratic,
        FieldName::Power,
        FieldName::Subharmonic,
        FieldName::Superharmonic,
        FieldName::CaloricQuadratic,
        FieldName::GaussianTranslate,
        FieldName::ExpRadial,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FieldName::Constant => "constant-1",
            FieldName::Linear => "linear",
            FieldName::HarmonicQuadratic => "harmonic-quadratic",
            FieldName::Power => "power",
            FieldName::Subharmonic => "subharmonic",
            FieldName::Superharmonic => "superharmonic",
            FieldName::CaloricQuadratic => "caloric-quadratic",
            FieldName::GaussianTranslate => "gaussian-translate",
            FieldName::ExpRadial => "exp-radial",
        }
    }
}

impl fmt::Display for FieldName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldName {
    type Err = MvError;

    fn from_str(s: &str) -> Result<Self> {
        FieldName::ALL
            .into_iter()
            .find(|f| f.as_str() == s || (s == "constant" && *f == FieldName::Constant))
            .ok_or_else(|| MvError::Usage(format!("unknown field '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Harmonic,
    Superharmonic,
    Subharmonic,
    Caloric,
    Supercaloric,
    Subcaloric,
    None,
}

/// Which quantity a spherical mean is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanOf {
    Value,
    Laplacian,
    TimeDerivative,
}

#[derive(Debug, Clone)]
pub struct TestField {
    name: FieldName,
    geom: FlowGeometry,
    class: Classification,
}

/// Radial profile `f(d)` with `f'` and `f''`.
type Radial = (f64, f64, f64);

/// Builds a catalog field on the given geometry.
pub fn make_field(name: FieldName, geom: &FlowGeometry) -> Result<TestField> {
    TestField::new(name, geom.clone())
}

impl TestField {
    pub fn new(name: FieldName, geom: FlowGeometry) -> Result<Self> {
        let n = geom.dimension();
        let euclidean = geom.is_flat();
        let cartan_hadamard = euclidean || matches!(geom.kind(), GeometryKind::Hyperbolic { .. });
        let reject = || unsupported(format!("field {name} is not available on {:?} (n = {n})", geom.kind()));
        let class = match name {
            FieldName::Constant => Classification::Harmonic,
            FieldName::Linear if euclidean => Classification::Harmonic,
            FieldName::HarmonicQuadratic if euclidean && n >= 2 => Classification::Harmonic,
            FieldName::Power if euclidean && n >= 3 => Classification::Harmonic,
            FieldName::Subharmonic if cartan_hadamard => Classification::Subharmonic,
            FieldName::Superharmonic if cartan_hadamard => Classification::Superharmonic,
            FieldName::CaloricQuadratic if euclidean => Classification::Caloric,
            FieldName::GaussianTranslate if euclidean => Classification::Caloric,
            FieldName::GaussianTranslate if matches!(geom.kind(), GeometryKind::Hyperbolic { .. }) && n == 3 => {
                Classification::Caloric
            }
            FieldName::ExpRadial => match geom.kind() {
                GeometryKind::Hyperbolic { k } if (n as f64 - 1.0) * k >= 1.0 => Classification::Superharmonic,
                _ => Classification::None,
            },
            _ => return reject(),
        };
        Ok(Self { name, geom, class })
    }

    pub fn name(&self) -> FieldName {
        self.name
    }

    pub fn classification(&self) -> Classification {
        self.class
    }

    pub fn geometry(&self) -> &FlowGeometry {
        &self.geom
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self.name, FieldName::Linear | FieldName::HarmonicQuadratic | FieldName::Power)
    }

    /// Radial profile at time `t`, for radial fields.
    fn radial(&self, d: f64, t: f64) -> Radial {
        let n = self.geom.dimension() as f64;
        match self.name {
            FieldName::Constant => (1.0, 0.0, 0.0),
            FieldName::Subharmonic => (d * d, 2.0 * d, 2.0),
            FieldName::Superharmonic => (SUPERHARMONIC_CONSTANT - d * d, -2.0 * d, -2.0),
            FieldName::CaloricQuadratic => (d * d + 2.0 * n * t, 2.0 * d, 2.0),
            FieldName::ExpRadial => {
                let e = (-d).exp();
                (e, -e, e)
            }
            FieldName::GaussianTranslate => {
                let s = t + GAUSSIAN_SOURCE_TIME;
                match self.geom.kind() {
                    GeometryKind::Hyperbolic { k } => {
                        let kd = k * d;
                        let (lr, dlr, ddlr) = if kd < 1e-4 {
                            (-kd * kd / 6.0, -k * kd / 3.0, -k * k / 3.0)
                        } else {
                            let sh = kd.sinh();
                            ((kd / sh).ln(), 1.0 / d - k / kd.tanh(), -1.0 / (d * d) + k * k / (sh * sh))
                        };
                        let f = (4.0 * PI * s).powf(-1.5) * (lr - d * d / (4.0 * s) - k * k * s).exp();
                        let g1 = dlr - d / (2.0 * s);
                        let g2 = ddlr - 1.0 / (2.0 * s);
                        (f, f * g1, f * (g1 * g1 + g2))
                    }
                    _ => {
                        let f = (4.0 * PI * s).powf(-0.5 * n) * (-d * d / (4.0 * s)).exp();
                        let g1 = -d / (2.0 * s);
                        (f, f * g1, f * (g1 * g1 - 1.0 / (2.0 * s)))
                    }
                }
            }
            _ => unreachable!("non-radial field"),
        }
    }

    /// Explicit time derivative of the radial profile at fixed `d`.
    fn radial_dt(&self, d: f64, t: f64) -> f64 {
        let n = self.geom.dimension() as f64;
        match self.name {
            FieldName::CaloricQuadratic => 2.0 * n,
            FieldName::GaussianTranslate => {
                let s = t + GAUSSIAN_SOURCE_TIME;
                let f = self.radial(d, t).0;
                match self.geom.kind() {
                    GeometryKind::Hyperbolic { k } => f * (-1.5 / s + d * d / (4.0 * s * s) - k * k),
                    _ => f * (-0.5 * n / s + d * d / (4.0 * s * s)),
                }
            }
            _ => 0.0,
        }
    }

    fn radial_laplacian(&self, d: f64, t: f64) -> f64 {
        let n = self.geom.dimension() as f64;
        let (_, f1, f2) = self.radial(d, t);
        if d == 0.0 {
            return n * f2;
        }
        let w = self.geom.warp(d, t);
        f2 + (n - 1.0) * w.dphi / w.phi * f1
    }

    /// `∂t v` at a fixed point of the manifold (comoving on shrinking models).
    fn radial_time_derivative(&self, d: f64, t: f64) -> f64 {
        let (_, f1, _) = self.radial(d, t);
        let c = self.geom.scale_sq(t);
        // ρ = √c x with x fixed
        self.radial_dt(d, t) + f1 * d * self.geom.scale_sq_rate(t) / (2.0 * c)
    }

    fn check(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.geom.dimension() {
            return Err(MvError::Range(format!("point has {} coordinates, expected {}", y.len(), self.geom.dimension())));
        }
        Ok(y.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    pub fn value(&self, y: &[f64], t: f64) -> Result<f64> {
        let d = self.check(y)?;
        Ok(match self.name {
            FieldName::Linear => y[0],
            FieldName::HarmonicQuadratic => y[0] * y[0] - y[1] * y[1],
            FieldName::Power => {
                let n = self.geom.dimension() as i32;
                let mut q = 0.0;
                for (i, yi) in y.iter().enumerate() {
                    let p = if i == 0 { POWER_POLE } else { 0.0 };
                    q += (yi - p) * (yi - p);
                }
                q.sqrt().powi(2 - n)
            }
            _ => self.radial(d, t).0,
        })
    }

    pub fn laplacian(&self, y: &[f64], t: f64) -> Result<f64> {
        let d = self.check(y)?;
        Ok(match self.name {
            FieldName::Linear | FieldName::HarmonicQuadratic | FieldName::Power => 0.0,
            _ => self.radial_laplacian(d, t),
        })
    }

    pub fn time_derivative(&self, y: &[f64], t: f64) -> Result<f64> {
        let d = self.check(y)?;
        Ok(match self.name {
            FieldName::Linear | FieldName::HarmonicQuadratic | FieldName::Power => 0.0,
            _ => self.radial_time_derivative(d, t),
        })
    }

    /// `(∂t − Δ) v`.
    pub fn heat_operator(&self, y: &[f64], t: f64) -> Result<f64> {
        Ok(self.time_derivative(y, t)? - self.laplacian(y, t)?)
    }

    /// Exact mean over the geodesic sphere of radius `ρ` about the pole.
    pub fn spherical_mean(&self, of: MeanOf, rho: f64, t: f64) -> f64 {
        let n = self.geom.dimension();
        match (self.name, of) {
            (FieldName::Linear | FieldName::HarmonicQuadratic, _) => 0.0,
            (FieldName::Power, MeanOf::Value) => rho.max(POWER_POLE).powi(2 - n as i32),
            (FieldName::Power, _) => 0.0,
            (_, MeanOf::Value) => self.radial(rho, t).0,
            (_, MeanOf::Laplacian) => self.radial_laplacian(rho, t),
            (_, MeanOf::TimeDerivative) => self.radial_time_derivative(rho, t),
        }
    }

    /// Smallest value of the field on the closed geodesic ball of radius
    /// `rho` at time `t`; sampled radially for radial fields.
    pub fn min_on_ball(&self, rho: f64, t: f64) -> f64 {
        match self.name {
            FieldName::Linear => -rho,
            FieldName::HarmonicQuadratic => -rho * rho,
            FieldName::Power => (POWER_POLE + rho).powi(2 - self.geom.dimension() as i32),
            _ => (0..=256).map(|i| self.radial(rho * i as f64 / 256.0, t).0).fold(f64::INFINITY, f64::min),
        }
    }

    /// Mean of `(∂t − Δ) v` over the geodesic sphere.
    pub fn heat_operator_mean(&self, rho: f64, t: f64) -> f64 {
        self.spherical_mean(MeanOf::TimeDerivative, rho, t) - self.spherical_mean(MeanOf::Laplacian, rho, t)
    }

    /// Mean over the sphere by a fixed-order product rule in `n ≤ 3`.
    pub fn angular_mean(&self, of: MeanOf, rho: f64, t: f64) -> Result<f64> {
        let n = self.geom.dimension();
        let eval = |y: &[f64]| match of {
            MeanOf::Value => self.value(y, t),
            MeanOf::Laplacian => self.laplacian(y, t),
            MeanOf::TimeDerivative => self.time_derivative(y, t),
        };
        let order = 48;
        let (nodes, weights) = gauss_legendre(order);
        match n {
            1 => Ok(0.5 * (eval(&[rho])? + eval(&[-rho])?)),
            2 => {
                let mut s = 0.0;
                for (x, w) in nodes.iter().zip(&weights) {
                    let th = PI * (x + 1.0);
                    s += w * eval(&[rho * th.cos(), rho * th.sin()])?;
                }
                Ok(s / 2.0)
            }
            3 => {
                let mut s = 0.0;
                for (z, wz) in nodes.iter().zip(&weights) {
                    let rxy = (1.0 - z * z).sqrt();
                    for (x, w) in nodes.iter().zip(&weights) {
                        let ph = PI * (x + 1.0);
                        s += wz * w * eval(&[rho * rxy * ph.cos(), rho * rxy * ph.sin(), rho * z])?;
                    }
                }
                Ok(s / 4.0)
            }
            _ => unsupported("angular quadrature is implemented for n <= 3"),
        }
    }
}

/// Largest violation of the field's classification over the samples,
/// `0` when the sign condition holds everywhere.
pub fn classification_check(field: &TestField, samples: &[(Vec<f64>, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (y, t) in samples {
        let lap = field.laplacian(y, *t)?;
        let heat = field.heat_operator(y, *t)?;
        let violation = match field.classification() {
            Classification::Harmonic => lap.abs(),
            Classification::Superharmonic => lap.max(0.0),
            Classification::Subharmonic => (-lap).max(0.0),
            Classification::Caloric => heat.abs(),
            Classification::Supercaloric => (-heat).max(0.0),
            Classification::Subcaloric => heat.max(0.0),
            Classification::None => 0.0,
        };
        worst = worst.max(violation);
    }
    Ok(worst)
}
