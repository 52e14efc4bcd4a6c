//! Reduced geometry on the model flows: L-length, radial L-geodesics in the
//! `σ = 2√τ` parametrization, reduced distance by shooting, reduced volume
//! and the curvature integral 𝒦.
//!
//! The center is the pole at `t₀ = 0` and `τ = -t`. Positions along a
//! geodesic are recorded as signed comoving arc lengths `x` (see
//! [`FlowGeometry::fold_comoving`]).

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{MvError, Result};
use crate::geometry::FlowGeometry;
use crate::numerics::{brent_with_values, dopri5, Estimate, Integrator, OdeOptions, Tolerance};

const SCAN_MIN: f64 = 1e-3;
const SCAN_MAX: f64 = 10.0;
const SCAN_STARTS: usize = 8;
const SCAN_LIMIT: f64 = 1e4;
const MEMO_CAPACITY: usize = 1 << 20;
/// Two shooting roots whose L-lengths agree this closely make the minimizer
/// ambiguous.
pub const CUT_LOCUS_TIE: f64 = 1e-6;

/// Terminal data of one shot, integrated as extra ODE components.
#[derive(Debug, Clone, Copy)]
struct ShotEnd {
    x: f64,
    p: f64,
    l_length: f64,
    k_integral: f64,
}

/// A shot radial L-geodesic leaving the pole.
#[derive(Debug, Clone)]
pub struct LGeodesic {
    /// Initial speed `|dγ/dσ|` at `σ = 0`.
    pub velocity: f64,
    pub sigma: Vec<f64>,
    /// Signed comoving arc length along the radial line.
    pub comoving: Vec<f64>,
    /// Geodesic radius from the pole at time `-σ²/4`.
    pub rho: Vec<f64>,
    pub sigma_bar: f64,
    pub tau_bar: f64,
    pub l_length: f64,
    /// `𝒦 = ∫ τ^{3/2} H(dγ/dτ) dτ` along the curve.
    pub k_integral: f64,
    pub end_rho: f64,
    /// Radial component of `dγ/dτ` at the endpoint, measured in `g(-τ̄)`.
    pub end_velocity: f64,
}

fn rhs(geom: &FlowGeometry, sigma: f64, y: &[f64; 4]) -> std::result::Result<[f64; 4], String> {
    let tau = 0.25 * sigma * sigma;
    let t = -tau;
    let c = geom.scale_sq(t);
    if !(c > 0.0) {
        return Err("flow became singular".into());
    }
    let lam = c.sqrt();
    let (x, p) = (y[0], y[1]);
    let rho = geom.fold_comoving(x).0 * lam;
    let r = geom.r_trace(rho, t);
    let dr_dx = geom.r_trace_comoving_gradient(x, t);
    let dr_drho = dr_dx / lam;
    let dr_dtau = -geom.r_trace_rate(rho, t);
    let ric_rad = geom.ricci(rho, t).0;
    let dx = p / c;
    let sqrt_tau = tau.sqrt();
    // τ^{3/2} H(X) dτ/dσ with |X| = λ x' / √τ, written without negative powers of τ
    let k_rate = 0.5
        * sigma
        * (-tau * sqrt_tau * dr_dtau - sqrt_tau * r - 2.0 * tau * lam * dx * dr_drho
            + 2.0 * ric_rad * sqrt_tau * c * dx * dx);
    Ok([dx, 0.125 * sigma * sigma * dr_dx, c * dx * dx + 0.25 * sigma * sigma * r, k_rate])
}

fn options() -> OdeOptions {
    OdeOptions { rtol: 1e-10, atol: 1e-12, max_steps: 200_000 }
}

fn shoot_end(geom: &FlowGeometry, v: f64, sigma_bar: f64) -> Result<ShotEnd> {
    let traj = dopri5(|s, y: &[f64; 4]| rhs(geom, s, y), 0.0, [0.0, v, 0.0, 0.0], sigma_bar, &options())?;
    let (_, y) = traj.last();
    Ok(ShotEnd { x: y[0], p: y[1], l_length: y[2], k_integral: y[3] })
}

/// Integrates the σ-form L-geodesic equation from the pole with initial
/// speed `v` (in `g(0)`) up to `σ̄`.
pub fn shoot_l_geodesic(geom: &FlowGeometry, v: f64, sigma_bar: f64) -> Result<LGeodesic> {
    if !(sigma_bar > 0.0) || !v.is_finite() {
        return Err(MvError::Range(format!("need sigma_bar > 0 and finite v, got {sigma_bar}, {v}")));
    }
    let traj = dopri5(|s, y: &[f64; 4]| rhs(geom, s, y), 0.0, [0.0, v, 0.0, 0.0], sigma_bar, &options())?;
    let rho = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(s, y)| geom.radius_of(geom.fold_comoving(y[0]).0, -0.25 * s * s))
        .collect();
    let (_, end) = traj.last();
    let tau_bar = 0.25 * sigma_bar * sigma_bar;
    let c = geom.scale_sq(-tau_bar);
    let (folded, reversed) = geom.fold_comoving(end[0]);
    let speed = c.sqrt() * (end[1] / c) / tau_bar.sqrt();
    Ok(LGeodesic {
        velocity: v,
        sigma: traj.times.clone(),
        comoving: traj.states.iter().map(|y| y[0]).collect(),
        rho,
        sigma_bar,
        tau_bar,
        l_length: end[2],
        k_integral: end[3],
        end_rho: geom.radius_of(folded, -tau_bar),
        end_velocity: if reversed { -speed } else { speed },
    })
}

/// L-length `∫₀^σ̄ (|dγ/dσ|² + σ²R/4) dσ` of a radial test curve given as a
/// signed comoving arc length `σ ↦ x(σ)`.
pub fn l_length<F>(geom: &FlowGeometry, path: F, sigma_bar: f64) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    if !(sigma_bar > 0.0) {
        return Err(MvError::Range("sigma_bar must be positive".into()));
    }
    let h = 1e-5 * sigma_bar.max(1.0);
    Integrator::new(Tolerance::new(1e-12, 1e-11)).integrate(
        |s| {
            let tau = 0.25 * s * s;
            let t = -tau;
            let x = path(s);
            let (folded, _) = geom.fold_comoving(x);
            let rho = geom.radius_of(folded, t);
            geom.check_point(rho, t)?;
            let (lo, hi) = ((s - h).max(0.0), (s + h).min(sigma_bar));
            let dx = (path(hi) - path(lo)) / (hi - lo);
            Ok(geom.scale_sq(t) * dx * dx + 0.25 * s * s * geom.r_trace(rho, t))
        },
        0.0,
        sigma_bar,
    )
}

/// Minimizing data at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPoint {
    pub ell: f64,
    pub l_length: f64,
    /// Initial speed of the minimizing geodesic.
    pub velocity: f64,
    /// Radial component of `X = dγ/dτ` at the endpoint.
    pub end_velocity: f64,
    pub k_integral: f64,
    /// Set when two distinct geodesics reach the point with L-lengths equal
    /// to within [`CUT_LOCUS_TIE`].
    pub cut_locus_warning: bool,
}

/// Shooting map `v ↦ x_end` sampled at the multi-start velocities, shared by
/// all targets at the same `τ`.
#[derive(Debug)]
struct Scan {
    v: Vec<f64>,
    ends: Vec<ShotEnd>,
}

fn key(v: f64) -> u64 {
    v.to_bits()
}

/// Reduced distance `ℓ(y, τ)` centered at the pole at `t₀ = 0`, with a
/// memo of evaluated points.
#[derive(Debug)]
pub struct ReducedDistanceField {
    geom: FlowGeometry,
    memo: RwLock<HashMap<(u64, u64), ReducedPoint>>,
    scans: RwLock<HashMap<u64, Arc<Scan>>>,
}

impl Clone for ReducedDistanceField {
    fn clone(&self) -> Self {
        Self::new(self.geom.clone())
    }
}

impl ReducedDistanceField {
    pub fn new(geom: FlowGeometry) -> Self {
        Self { geom, memo: RwLock::new(HashMap::new()), scans: RwLock::new(HashMap::new()) }
    }

    pub fn geometry(&self) -> &FlowGeometry {
        &self.geom
    }

    pub fn dimension(&self) -> usize {
        self.geom.dimension()
    }

    /// Number of memoized points.
    pub fn memo_len(&self) -> usize {
        self.memo.read().map(|m| m.len()).unwrap_or(0)
    }

    fn scan(&self, tau: f64) -> Result<Arc<Scan>> {
        let key = key(tau);
        if let Some(s) = self.scans.read().ok().and_then(|m| m.get(&key).cloned()) {
            return Ok(s);
        }
        let sigma_bar = 2.0 * tau.sqrt();
        let mut v = vec![0.0];
        let ratio = (SCAN_MAX / SCAN_MIN).powf(1.0 / (SCAN_STARTS - 1) as f64);
        v.extend((0..SCAN_STARTS).map(|i| SCAN_MIN * ratio.powi(i as i32)));
        let ends = v.iter().map(|&vi| shoot_end(&self.geom, vi, sigma_bar)).collect::<Result<Vec<_>>>()?;
        let scan = Arc::new(Scan { v, ends });
        if let Ok(mut m) = self.scans.write() {
            if m.len() > MEMO_CAPACITY {
                m.clear();
            }
            m.insert(key, scan.clone());
        }
        Ok(scan)
    }

    /// Full minimizing data at `(ρ, τ)`.
    pub fn evaluate(&self, rho: f64, tau: f64) -> Result<ReducedPoint> {
        if !(tau > 0.0) {
            return Err(MvError::Range(format!("tau must be positive, got {tau}")));
        }
        self.geom.check_point(rho, -tau)?;
        let key = (key(rho), key(tau));
        if let Some(p) = self.memo.read().ok().and_then(|m| m.get(&key).copied()) {
            return Ok(p);
        }
        let point = self.solve(rho, tau)?;
        if let Ok(mut m) = self.memo.write() {
            if m.len() > MEMO_CAPACITY {
                m.clear();
            }
            m.insert(key, point);
        }
        Ok(point)
    }

    /// `ℓ(ρ, τ) = 𝓛_min / (2√τ)`.
    pub fn reduced_distance(&self, rho: f64, tau: f64) -> Result<f64> {
        Ok(self.evaluate(rho, tau)?.ell)
    }

    fn solve(&self, rho: f64, tau: f64) -> Result<ReducedPoint> {
        let geom = &self.geom;
        let sigma_bar = 2.0 * tau.sqrt();
        let target = geom.comoving(rho, -tau);
        let base = self.scan(tau)?;
        let mut v = base.v.clone();
        let mut ends = base.ends.clone();
        while ends.last().map(|e| e.x).unwrap_or(0.0) < target {
            let next = 2.0 * v.last().copied().unwrap_or(SCAN_MAX);
            if next > SCAN_LIMIT {
                return Err(MvError::Unreachable { rho, tau });
            }
            ends.push(shoot_end(geom, next, sigma_bar)?);
            v.push(next);
        }
        if ends.windows(2).any(|w| w[1].x < w[0].x) {
            return Err(MvError::Solver { sigma: sigma_bar, reason: "shooting map is not monotone in v".into() });
        }

        let mut roots: Vec<(f64, ShotEnd)> = Vec::new();
        for i in 0..v.len() - 1 {
            let (ea, eb) = (ends[i], ends[i + 1]);
            // L grows with v on every bracket here, so a bracket whose cheaper
            // end already exceeds the best root cannot hold the minimizer
            if let Some(best) = roots.iter().map(|r| r.1.l_length).reduce(f64::min) {
                if ea.l_length.min(eb.l_length) > best + CUT_LOCUS_TIE {
                    continue;
                }
            }
            for lift in geom.comoving_lifts(target, ea.x, eb.x) {
                let root = if lift == ea.x {
                    v[i]
                } else if lift == eb.x {
                    v[i + 1]
                } else {
                    brent_with_values(
                        |vv| Ok(shoot_end(geom, vv, sigma_bar)?.x - lift),
                        v[i],
                        ea.x - lift,
                        v[i + 1],
                        eb.x - lift,
                        1e-14,
                    )?
                };
                if roots.iter().any(|r| (r.0 - root).abs() <= 1e-12 * root.max(1.0)) {
                    continue;
                }
                roots.push((root, shoot_end(geom, root, sigma_bar)?));
            }
        }
        roots.sort_by(|a, b| a.1.l_length.total_cmp(&b.1.l_length));
        let (velocity, end) = *roots.first().ok_or(MvError::Unreachable { rho, tau })?;
        let cut_locus_warning = roots.len() > 1 && roots[1].1.l_length - end.l_length <= CUT_LOCUS_TIE;

        let c = geom.scale_sq(-tau);
        let (_, reversed) = geom.fold_comoving(end.x);
        let speed = c.sqrt() * (end.p / c) / tau.sqrt();
        Ok(ReducedPoint {
            ell: end.l_length / sigma_bar,
            l_length: end.l_length,
            velocity,
            end_velocity: if reversed { -speed } else { speed },
            k_integral: end.k_integral,
            cut_locus_warning,
        })
    }

    /// `ℓ` at the point whose comoving coordinate is `x`, at backward time `τ`.
    fn ell_at_fixed_point(&self, x: f64, tau: f64) -> Result<f64> {
        self.reduced_distance(self.geom.radius_of(x.abs(), -tau), tau)
    }

    /// ℓ with its first two radial derivatives and the τ-derivative at a
    /// fixed point, by fourth-order central differences with radial step
    /// `h·max(1, ρ)` and time step `h·τ`.
    pub fn jet(&self, rho: f64, tau: f64, h: f64) -> Result<EllJet> {
        let hr = h * rho.max(1.0);
        let ell = self.reduced_distance(rho, tau)?;
        // ℓ is even in ρ through the pole
        let at = |k: f64| self.reduced_distance((rho + k * hr).abs(), tau);
        let (p1, m1, p2, m2) = (at(1.0)?, at(-1.0)?, at(2.0)?, at(-2.0)?);
        let ht = h * tau;
        let x = self.geom.comoving(rho, -tau);
        let at_time = |k: f64| self.ell_at_fixed_point(x, tau + k * ht);
        let (tp1, tm1, tp2, tm2) = (at_time(1.0)?, at_time(-1.0)?, at_time(2.0)?, at_time(-2.0)?);
        Ok(EllJet {
            ell,
            ell_rho: (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * hr),
            ell_rhorho: (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * ell) / (12.0 * hr * hr),
            ell_tau: (8.0 * (tp1 - tm1) - (tp2 - tm2)) / (12.0 * ht),
        })
    }

    /// Residuals of `∇L = 2√τ X` and `∂τ L = √τ (R − |X|²)`, `L = 2√τ ℓ`.
    pub fn gauss_identity_residuals(&self, rho: f64, tau: f64, h: f64) -> Result<(f64, f64)> {
        if rho <= 0.0 {
            return Err(MvError::Range("the Gauss-lemma identities are checked off the center".into()));
        }
        let point = self.evaluate(rho, tau)?;
        let big_l = |r: f64, t: f64| -> Result<f64> { Ok(2.0 * t.sqrt() * self.reduced_distance(r, t)?) };
        let hr = h * rho.max(1.0);
        let grad = (big_l(rho + hr, tau)? - big_l(rho - hr, tau)?) / (2.0 * hr);
        let x = self.geom.comoving(rho, -tau);
        let ht = h * tau;
        let at = |t: f64| big_l(self.geom.radius_of(x, -t), t);
        let dtau = (at(tau + ht)? - at(tau - ht)?) / (2.0 * ht);
        let r = self.geom.r_trace(rho, -tau);
        let xv = point.end_velocity;
        let res1 = (grad - 2.0 * tau.sqrt() * xv).abs();
        let res2 = (dtau - tau.sqrt() * (r - xv * xv)).abs();
        Ok((res1, res2))
    }

    /// `𝒦(ρ, τ̄)` along the minimizing geodesic.
    pub fn k_curvature_integral(&self, rho: f64, tau: f64) -> Result<f64> {
        Ok(self.evaluate(rho, tau)?.k_integral)
    }

    /// Sub-heat kernel `(4πτ)^{-n/2} e^{-ℓ}`.
    pub fn sub_heat_value(&self, rho: f64, tau: f64) -> Result<f64> {
        let n = self.dimension() as f64;
        Ok((4.0 * std::f64::consts::PI * tau).powf(-0.5 * n) * (-self.reduced_distance(rho, tau)?).exp())
    }

    /// Reduced volume `θ(τ) = ∫ K̂ dμ` by adaptive radial quadrature.
    pub fn reduced_volume(&self, tau: f64) -> Result<Estimate> {
        if !(tau > 0.0) {
            return Err(MvError::Range(format!("tau must be positive, got {tau}")));
        }
        let geom = &self.geom;
        let t = -tau;
        let rho_end = if geom.rho_max(t).is_finite() {
            geom.rho_max(t) * (1.0 - 1e-12)
        } else {
            // ℓ = ρ²/4τ on the static and flat models; stop where e^{-ℓ}
            // beats any exponential volume growth by e^{-60}
            let growth = match geom.kind() {
                crate::geometry::GeometryKind::Hyperbolic { k } => (geom.dimension() as f64 - 1.0) * k,
                _ => 0.0,
            };
            2.0 * tau * growth + ((2.0 * tau * growth).powi(2) + 240.0 * tau).sqrt()
        };
        Integrator::new(Tolerance::new(1e-9, 1e-9)).integrate(
            |rho| {
                if rho == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.sub_heat_value(rho, tau)? * geom.sphere_area_unchecked(rho, t))
            },
            0.0,
            rho_end,
        )
    }
}

/// ℓ and its derivatives at one point; `ell_tau` is taken at a fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllJet {
    pub ell: f64,
    pub ell_rho: f64,
    pub ell_rhorho: f64,
    pub ell_tau: f64,
}
