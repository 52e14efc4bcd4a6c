//! Fixed verification batteries behind `mvlab verify`.
//!
//! Every battery is a list of tasks tagged with the geometry they exercise;
//! tasks run concurrently and their checks are assembled in declaration
//! order, so reports are deterministic.

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::{self, MvForm};
use crate::error::{MvError, Result};
use crate::fields::{make_field, FieldName};
use crate::geometry::{FlowGeometry, ProbeField, SpaceTimePoint};
use crate::kernels::Kernel;
use crate::mcf::{gaussian_density_closed_form, mcf_sweep, ShrinkingSphereMcf};
use crate::parabolic;
use crate::reduced::ReducedDistanceField;
use crate::report::{Check, SuiteReport};
use crate::sweep::{Direction, MONOTONICITY_SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Elliptic,
    Parabolic,
    Ricci,
    Mcf,
    Reduced,
    All,
}

impl Suite {
    pub const BATTERIES: [Suite; 5] = [Suite::Elliptic, Suite::Parabolic, Suite::Ricci, Suite::Mcf, Suite::Reduced];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Elliptic => "elliptic",
            Suite::Parabolic => "parabolic",
            Suite::Ricci => "ricci",
            Suite::Mcf => "mcf",
            Suite::Reduced => "reduced",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = MvError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::BATTERIES
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.as_str() == s)
            .ok_or_else(|| MvError::Usage(format!("unknown suite '{s}'")))
    }
}

/// Knobs shared by all batteries.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Restricts the battery to tasks on this geometry tag.
    pub geometry: Option<String>,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    /// Level grid for the Ricci-flow sweep on the shrinking sphere.
    pub r_grid: Vec<f64>,
    /// Backward times for the reduced-volume sweep.
    pub tau_grid: Vec<f64>,
    /// Inner level of `Î(a, r)`.
    pub a: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            geometry: None,
            tol_scale: 1.0,
            r_grid: vec![0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
            tau_grid: vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
            a: 0.2,
        }
    }
}

type TaskFn = Box<dyn Fn(&SuiteConfig) -> Result<Vec<Check>> + Send + Sync>;

struct Task {
    name: &'static str,
    geometry: &'static str,
    run: TaskFn,
}

fn task<F>(name: &'static str, geometry: &'static str, f: F) -> Task
where
    F: Fn(&SuiteConfig) -> Result<Vec<Check>> + Send + Sync + 'static,
{
    Task { name, geometry, run: Box::new(f) }
}

fn field(name: FieldName, g: &FlowGeometry) -> Result<crate::fields::TestField> {
    make_field(name, g)
}

fn e3() -> FlowGeometry {
    FlowGeometry::euclidean(3)
}

fn h3() -> FlowGeometry {
    FlowGeometry::hyperbolic(3, 1.0).expect("unit curvature is valid")
}

fn s3() -> FlowGeometry {
    FlowGeometry::shrinking_sphere(3).expect("n = 3 is valid")
}

/// Closed-form reduced distance of the shrinking round sphere centered at
/// the pole at `t₀ = 0`.
pub fn sphere_ell_closed_form(geom: &FlowGeometry, rho: f64, tau: f64) -> f64 {
    let n = geom.dimension() as f64;
    let a = 0.5 * (n - 1.0);
    let sigma = 2.0 * tau.sqrt();
    let w = (a.sqrt() * sigma).atan() / a.sqrt();
    let x = geom.comoving(rho, -tau);
    x * x / (sigma * w) + 0.5 * n * (1.0 - w / sigma)
}

fn elliptic_tasks() -> Vec<Task> {
    vec![
        task("green-flux", "euclidean3", |c| {
            let g = Kernel::exact_green(e3())?;
            let one = field(FieldName::Constant, &e3())?;
            [0.5, 1.0, 2.0]
                .iter()
                .map(|&r| {
                    let j = elliptic::j_v(&g, &one, r)?;
                    Ok(Check::close(format!("green-flux/euclidean3/r={r}"), j.value, 1.0, 1e-8 * c.tol_scale, j.error))
                })
                .collect()
        }),
        task("harmonic-mean", "euclidean3", |c| {
            let g = Kernel::exact_green(e3())?;
            let v = field(FieldName::HarmonicQuadratic, &e3())?;
            [0.5, 1.0, 2.0]
                .iter()
                .map(|&r| {
                    let j = elliptic::j_v(&g, &v, r)?;
                    Ok(Check::close(format!("harmonic-quadratic-j/euclidean3/r={r}"), j.value, 0.0, 1e-7 * c.tol_scale, j.error))
                })
                .collect()
        }),
        task("j-derivative", "euclidean3", |c| {
            let g = Kernel::exact_green(e3())?;
            let v = field(FieldName::Superharmonic, &e3())?;
            let h = elliptic::SWEEP_FD_STEP;
            let d = (elliptic::j_v(&g, &v, 1.0 + h)?.value - elliptic::j_v(&g, &v, 1.0 - h)?.value) / (2.0 * h);
            Ok(vec![Check::close("j-derivative/euclidean3/r=1", d, -3.0 / (8.0 * PI * PI), 1e-4 * c.tol_scale, 0.0)])
        }),
        task("mean-value-identities", "euclidean3", |c| {
            let g = Kernel::exact_green(e3())?;
            let v = field(FieldName::Superharmonic, &e3())?;
            let mut out = Vec::new();
            for (form, label) in [(MvForm::Sphere, "sphere"), (MvForm::Ball, "ball")] {
                let chk = elliptic::mv_identity(&g, &v, 1.0, form)?;
                out.push(Check::close(format!("mv-identity-{label}/euclidean3/superharmonic"), chk.rhs.value, chk.lhs, 1e-6 * c.tol_scale, chk.rhs.error));
            }
            Ok(out)
        }),
        task("sphere-ball-relation", "euclidean3", |c| {
            let g = Kernel::exact_green(e3())?;
            let v = field(FieldName::Superharmonic, &e3())?;
            let lhs = elliptic::i_v(&g, &v, 1.0)?.value;
            let rhs = elliptic::integrated_j(&g, &v, 1.0)?.value;
            let rel = (lhs - rhs).abs() / lhs.abs();
            Ok(vec![Check::at_most("sphere-ball-relation/euclidean3/r=1", rel, 1e-6 * c.tol_scale)])
        }),
        task("iterated-identity", "euclidean3", |c| {
            let g = Kernel::exact_green(e3())?;
            let (_, _, res) = elliptic::iterated_identity_check(&g, |_| 1.0, 1.0)?;
            let (_, _, res6) = elliptic::iterated_identity_check(&g, |rho| 6.0 + rho * rho, 0.8)?;
            Ok(vec![
                Check::at_most("iterated-identity/euclidean3/f=1", res, 1e-6 * c.tol_scale),
                Check::at_most("iterated-identity/euclidean3/f=6+rho^2", res6, 1e-6 * c.tol_scale),
            ])
        }),
        task("superharmonic-sweep", "euclidean3", |c| {
            let g = Kernel::exact_green(e3())?;
            let v = field(FieldName::Superharmonic, &e3())?;
            let sw = elliptic::elliptic_sweep(&g, &v, &[0.4, 0.6, 0.8, 1.0, 1.2], Direction::NonIncreasing, MONOTONICITY_SLACK * c.tol_scale)?;
            Ok(vec![
                Check::monotone("i-monotone/euclidean3/superharmonic", &sw.i),
                Check::monotone("j-monotone/euclidean3/superharmonic", &sw.j),
                Check::holds("i-derivative-formula/euclidean3", sw.i_derivative.iter().all(|d| d.holds), ""),
                Check::holds("j-derivative-formula/euclidean3", sw.j_derivative.iter().all(|d| d.holds), ""),
            ])
        }),
        task("space-form-equality", "hyperbolic3", |c| {
            let g = Kernel::exact_green(h3())?;
            let mut out = Vec::new();
            for name in [FieldName::Constant, FieldName::ExpRadial] {
                let v = field(name, &h3())?;
                for (form, label) in [(MvForm::Sphere, "sphere"), (MvForm::Ball, "ball")] {
                    let d = elliptic::mv_identity(&g, &v, 1.0, form)?;
                    out.push(Check::at_most(format!("exact-green-deficit-{label}/hyperbolic3/{name}"), d.residual, 1e-6 * c.tol_scale));
                }
            }
            Ok(out)
        }),
        task("sub-green-inequality", "hyperbolic3", |c| {
            let v = field(FieldName::ExpRadial, &h3())?;
            let mut out = Vec::new();
            for k in [1.0, 2.0] {
                let g = Kernel::sub_green(h3(), k)?;
                for (form, label) in [(MvForm::Sphere, "sphere"), (MvForm::Ball, "ball")] {
                    let d = elliptic::mv_inequality_deficit(&g, &v, 1.0, form)?;
                    out.push(Check::at_least(format!("sub-green-deficit-{label}/hyperbolic3/k={k}/exp-radial"), d.value, 0.0, 1e-7 * c.tol_scale).with_err(d.error));
                }
            }
            let strict = elliptic::mv_inequality_deficit(&Kernel::sub_green(h3(), 2.0)?, &v, 1.0, MvForm::Sphere)?;
            out.push(Check::at_least("sub-green-strict/hyperbolic3/k=2", strict.value, 1e-6, 0.0).with_note("strict comparison leaves a positive gap"));
            Ok(out)
        }),
        task("sup-green-inequality", "hyperbolic3", |c| {
            let g = Kernel::sup_green(h3())?;
            let one = field(FieldName::Constant, &h3())?;
            let mut out = Vec::new();
            for (form, label) in [(MvForm::Sphere, "sphere"), (MvForm::Ball, "ball")] {
                let d = elliptic::mv_inequality_deficit(&g, &one, 1.0, form)?;
                out.push(Check::at_least(format!("sup-green-deficit-{label}/hyperbolic3/constant-1"), d.value, 0.0, 1e-7 * c.tol_scale).with_err(d.error));
            }
            let sw = elliptic::elliptic_sweep(&g, &one, &[0.4, 0.6, 0.8, 1.0], Direction::NonDecreasing, MONOTONICITY_SLACK * c.tol_scale)?;
            out.push(Check::holds("sup-green-derivative-bounds/hyperbolic3", sw.j_derivative.iter().chain(&sw.i_derivative).all(|d| d.holds), "derivative >= bound"));
            Ok(out)
        }),
        task("strong-non-parabolicity", "euclidean3", |_| {
            Ok(vec![
                Check::holds("strongly-non-parabolic/euclidean3", elliptic::is_strongly_non_parabolic(&e3()), ""),
                Check::holds("strongly-non-parabolic/hyperbolic3", elliptic::is_strongly_non_parabolic(&h3()), ""),
                Check::holds("parabolic/euclidean2", !elliptic::is_strongly_non_parabolic(&FlowGeometry::euclidean(2)), ""),
            ])
        }),
    ]
}

fn parabolic_tasks() -> Vec<Task> {
    let mut tasks = vec![
        task("caloric-heat-ball", "euclidean2", |c| {
            let e2 = FlowGeometry::euclidean(2);
            let h = Kernel::heat(e2.clone())?;
            let u = field(FieldName::CaloricQuadratic, &e2)?;
            let mut out = Vec::new();
            for r in [0.5, 1.0] {
                let ball = parabolic::mv_heat_ball(&h, &u, r)?;
                out.push(Check::close(format!("caloric-heat-ball/euclidean2/r={r}"), ball.rhs.value, 0.0, 1e-5 * c.tol_scale, ball.rhs.error));
                let sphere = parabolic::mv_heat_sphere(&h, &u, r)?;
                out.push(Check::close(format!("heat-sphere-caloric/euclidean2/r={r}"), sphere.rhs.value, 0.0, 1e-5 * c.tol_scale, sphere.rhs.error));
            }
            Ok(out)
        }),
        task("constant-heat-identities", "euclidean3", |c| {
            let h = Kernel::heat(e3())?;
            let one = field(FieldName::Constant, &e3())?;
            let ball = parabolic::mv_heat_ball(&h, &one, 0.7)?;
            let sphere = parabolic::mv_heat_sphere(&h, &one, 0.7)?;
            Ok(vec![
                Check::at_most("heat-ball-constant/euclidean3", ball.residual, 1e-5 * c.tol_scale),
                Check::at_most("heat-sphere-constant/euclidean3", sphere.residual, 1e-5 * c.tol_scale),
            ])
        }),
        task("curved-heat-sphere", "hyperbolic3", |c| {
            let h = Kernel::heat(h3())?;
            let mut out = Vec::new();
            for name in [FieldName::Constant, FieldName::ExpRadial] {
                let v = field(name, &h3())?;
                out.push(Check::at_most(format!("heat-sphere/hyperbolic3/{name}"), parabolic::mv_heat_sphere(&h, &v, 0.5)?.residual, 1e-4 * c.tol_scale));
                out.push(Check::at_most(format!("heat-ball/hyperbolic3/{name}"), parabolic::mv_heat_ball(&h, &v, 0.5)?.residual, 1e-4 * c.tol_scale));
            }
            Ok(out)
        }),
        task("static-surface-forms", "euclidean3", |c| {
            let forms = parabolic::surface_form_residual(&Kernel::heat(e3())?, 0.7)?;
            Ok(vec![
                Check::at_most("surface-form-j/euclidean3", forms.j_residual, 1e-6 * c.tol_scale),
                Check::at_most("surface-form-i/euclidean3", forms.i_residual, 1e-6 * c.tol_scale),
            ])
        }),
        task("heat-sphere-ball-relation", "euclidean3", |c| {
            let h = Kernel::heat(e3())?;
            let v = field(FieldName::GaussianTranslate, &e3())?;
            let (_, _, rel) = parabolic::sphere_ball_relation(&h, &v, 0.7)?;
            Ok(vec![Check::at_most("heat-sphere-ball-relation/euclidean3/gaussian-translate", rel, 1e-6 * c.tol_scale)])
        }),
        task("forward-monotonicity", "euclidean3", |c| {
            let h = Kernel::heat(e3())?;
            let one = field(FieldName::Constant, &e3())?;
            let (i, j) = parabolic::heat_sweep(&h, &one, &[0.3, 0.5, 0.7, 0.9], Direction::NonIncreasing, MONOTONICITY_SLACK * c.tol_scale)?;
            Ok(vec![Check::monotone("forward-i-monotone/euclidean3", &i), Check::monotone("forward-j-monotone/euclidean3", &j)])
        }),
        task("cap-limit", "euclidean2", |_| {
            let e2 = FlowGeometry::euclidean(2);
            let h = Kernel::heat(e2.clone())?;
            let one = field(FieldName::Constant, &e2)?;
            let errs = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&s| Ok((parabolic::cap_integral(&h, &one, 1.0, s)?.value - 1.0).abs()))
                .collect::<Result<Vec<f64>>>()?;
            let ok = errs[0] > errs[1] && errs[1] > errs[2] && errs[2] < 1e-2;
            Ok(vec![Check::holds("cap-integral-limit/euclidean2", ok, format!("errors {:?}", errs))])
        }),
    ];
    for (tag, geom) in [
        ("euclidean3", e3()),
        ("hyperbolic3", h3()),
        ("shrinking-s2", FlowGeometry::shrinking_sphere(2).expect("n = 2 is valid")),
        ("shrinking-s3", s3()),
        ("gaussian", FlowGeometry::gaussian_soliton(3)),
    ] {
        tasks.push(task("spacetime-lemmas", tag, move |c| {
            let n = geom.dimension();
            let mut worst_conn: f64 = 0.0;
            let mut worst_div: f64 = 0.0;
            for (rho, t) in [(0.4, -0.1), (0.9, 0.0), (1.2, -0.3)] {
                let p = SpaceTimePoint::with_direction(rho, [0.3, -0.5, 0.8][..n].to_vec(), t);
                let a = geom.spacetime_christoffels(&p)?;
                let b = geom.spacetime_christoffels_fd(&p, 1e-4)?;
                worst_conn = worst_conn.max(a.max_abs_diff(&b));
                let da = geom.spacetime_divergence(&ProbeField, &p)?;
                let db = geom.spacetime_divergence_fd(&ProbeField, &p, 1e-4)?;
                worst_div = worst_div.max((da - db).abs());
            }
            Ok(vec![
                Check::at_most(format!("christoffel-vs-fd/{tag}"), worst_conn, 1e-6 * c.tol_scale),
                Check::at_most(format!("divergence-vs-fd/{tag}"), worst_div, 1e-6 * c.tol_scale),
            ])
        }));
    }
    tasks
}

fn sub_heat(geom: FlowGeometry) -> (Arc<ReducedDistanceField>, Kernel) {
    let f = Arc::new(ReducedDistanceField::new(geom));
    let k = Kernel::sub_heat(f.clone());
    (f, k)
}

fn soliton_samples() -> Vec<(f64, f64)> {
    [0.1, 0.4, 0.7, 1.0].iter().flat_map(|&r| [0.1, 0.2, 0.3].map(move |t| (r, t))).collect()
}

fn ricci_tasks() -> Vec<Task> {
    vec![
        task("equality-case", "gaussian", |c| {
            let (_, k) = sub_heat(FlowGeometry::gaussian_soliton(3));
            let mut out = Vec::new();
            for r in [0.3, 0.5, 0.8] {
                let j = parabolic::jhat(&k, r)?;
                out.push(Check::close(format!("jhat/gaussian/r={r}"), j.value, 1.0, 1e-4 * c.tol_scale, j.error));
                let i = parabolic::ihat(&k, 0.0, r)?;
                out.push(Check::close(format!("ihat/gaussian/a=0/r={r}"), i.value, 1.0, 1e-4 * c.tol_scale, i.error));
            }
            let inner = parabolic::ihat_inner_sweep(&k, &[0.0, 0.2, 0.4], 0.8, MONOTONICITY_SLACK * c.tol_scale)?;
            out.push(Check::monotone("ihat-in-a/gaussian/r=0.8", &inner));
            out.push(Check::at_most("ihat-in-a-constant/gaussian/r=0.8", inner.max_deviation_from(1.0), 1e-4 * c.tol_scale));
            Ok(out)
        }),
        task("soliton-identities", "gaussian", |c| {
            let (f, k) = sub_heat(FlowGeometry::gaussian_soliton(3));
            let s = parabolic::soliton_residuals(&f, &soliton_samples())?;
            let ly = parabolic::harnack_rcf_residuals(&k, &soliton_samples())?;
            let max = parabolic::SolitonCheck::max_abs;
            Ok(vec![
                Check::at_most("heat-ell/gaussian", max(&s.heat_ell), 1e-6 * c.tol_scale),
                Check::at_most("hyper-ell/gaussian", max(&s.hyper_ell), 1e-6 * c.tol_scale),
                Check::at_most("entropy-integrand/gaussian", max(&s.entropy), 1e-6 * c.tol_scale),
                Check::at_most("soliton-tensor/gaussian", max(&s.soliton_tensor), 1e-6 * c.tol_scale),
                Check::at_most("harnack-rcf/gaussian", max(&ly), 1e-8 * c.tol_scale),
            ])
        }),
        task("surface-forms", "gaussian", |c| {
            let (_, k) = sub_heat(FlowGeometry::gaussian_soliton(3));
            let forms = parabolic::surface_form_residual(&k, 0.5)?;
            Ok(vec![
                Check::at_most("surface-form-jhat/gaussian", forms.j_residual, 1e-5 * c.tol_scale),
                Check::at_most("surface-form-ihat/gaussian", forms.i_residual, 1e-5 * c.tol_scale),
            ])
        }),
        task("jhat-sweep", "shrinking-s3", |c| {
            let (_, k) = sub_heat(s3());
            let tol = MONOTONICITY_SLACK * c.tol_scale;
            let sw = parabolic::jhat_sweep(&k, &c.r_grid, c.a, tol)?;
            Ok(vec![
                Check::monotone("jhat-monotone/shrinking-s3", &sw.jhat),
                Check::monotone(format!("ihat-monotone/shrinking-s3/a={}", c.a), &sw.ihat),
                Check::holds("jhat-below-ihat/shrinking-s3", sw.ordered.iter().all(|&b| b), ""),
                Check::at_most("jhat-slope/shrinking-s3", sw.jhat_slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max), tol),
            ])
        }),
        task("hat-relation", "shrinking-s3", |c| {
            let (_, k) = sub_heat(s3());
            let (_, _, rel) = parabolic::hat_relation(&k, 0.5)?;
            Ok(vec![Check::at_most("jhat-ihat-relation/shrinking-s3/r=0.5", rel, 1e-4 * c.tol_scale)])
        }),
        task("curved-surface-forms", "shrinking-s3", |c| {
            let (_, k) = sub_heat(s3());
            let forms = parabolic::surface_form_residual(&k, 0.5)?;
            Ok(vec![
                Check::at_most("surface-form-jhat/shrinking-s3", forms.j_residual, 1e-4 * c.tol_scale),
                Check::at_most("surface-form-ihat/shrinking-s3", forms.i_residual, 1e-4 * c.tol_scale),
            ])
        }),
        task("curved-soliton-identities", "shrinking-s3", |c| {
            let (f, k) = sub_heat(s3());
            let samples = soliton_samples();
            let s = parabolic::soliton_residuals(&f, &samples)?;
            let ly = parabolic::harnack_rcf_residuals(&k, &samples)?;
            let min_heat = s.heat_ell.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok(vec![
                Check::at_most("hyper-ell/shrinking-s3", parabolic::SolitonCheck::max_abs(&s.hyper_ell), 1e-4 * c.tol_scale),
                Check::at_least("heat-ell-sign/shrinking-s3", min_heat, 0.0, 1e-4 * c.tol_scale)
                    .with_note("sub-heat direction: (d/dtau - Delta + R) K <= 0"),
                Check::at_most("harnack-rcf/shrinking-s3", ly.iter().cloned().fold(0.0, f64::max), 1e-3 * c.tol_scale),
            ])
        }),
        task("reduced-volume-monotone", "shrinking-s3", |c| {
            let f = ReducedDistanceField::new(s3());
            let mut sw = parabolic::theta_sweep(&f, &c.tau_grid)?;
            sw = crate::sweep::SweepReport::new("theta", Direction::NonIncreasing, sw.grid.clone(), &estimates(&sw), parabolic::THETA_SLACK * c.tol_scale.max(1.0))?;
            Ok(vec![Check::monotone("theta-monotone/shrinking-s3", &sw)])
        }),
    ]
}

fn estimates(sw: &crate::sweep::SweepReport) -> Vec<crate::numerics::Estimate> {
    sw.values.iter().zip(&sw.errors).map(|(&v, &e)| crate::numerics::Estimate::new(v, e)).collect()
}

fn mcf_tasks() -> Vec<Task> {
    vec![
        task("gaussian-density", "mcf-sphere", |c| {
            let circle = ShrinkingSphereMcf::new(1)?;
            let theta = circle.gaussian_density()?;
            let mut out = vec![Check::close("gaussian-density/n=1", theta.value, (2.0 * PI / std::f64::consts::E).sqrt(), 1e-5 * c.tol_scale, theta.error)];
            for r in [0.3, 0.5, 0.8] {
                let j = circle.jbar(r)?;
                out.push(Check::close(format!("jbar/n=1/r={r}"), j.value, theta.value, 1e-4 * c.tol_scale, j.error));
            }
            let sphere = ShrinkingSphereMcf::new(2)?;
            for r in [0.3, 0.5, 0.8] {
                let i = sphere.ibar(0.0, r)?;
                out.push(Check::close(format!("ibar/n=2/a=0/r={r}"), i.value, gaussian_density_closed_form(2), 1e-4 * c.tol_scale, i.error));
            }
            Ok(out)
        }),
        task("mcf-monotone", "mcf-sphere", |c| {
            let mut out = Vec::new();
            for n in [1, 2] {
                let flow = ShrinkingSphereMcf::new(n)?;
                let (j, i) = mcf_sweep(&flow, &[0.3, 0.5, 0.7, 0.9], c.a, MONOTONICITY_SLACK * c.tol_scale)?;
                out.push(Check::monotone(format!("jbar-monotone/n={n}"), &j));
                out.push(Check::monotone(format!("ibar-monotone/n={n}/a={}", c.a), &i));
            }
            Ok(out)
        }),
        task("harnack-mcf", "mcf-sphere", |c| {
            let samples = [(0.3, 0.1), (1.2, 0.4), (2.9, 1.0), (PI, 0.05)];
            let centered = ShrinkingSphereMcf::new(1)?.harnack_residuals(&samples)?;
            let shifted = ShrinkingSphereMcf::with_center(1, vec![0.3, -0.2])?.harnack_residuals(&samples)?;
            let max = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
            Ok(vec![
                Check::at_most("harnack-mcf/n=1", max(&centered), 1e-8 * c.tol_scale),
                Check::at_most("harnack-mcf/n=1/off-center", max(&shifted), 1e-8 * c.tol_scale),
            ])
        }),
    ]
}

fn reduced_tasks() -> Vec<Task> {
    vec![
        task("flat-ell", "gaussian", |c| {
            let f = ReducedDistanceField::new(FlowGeometry::gaussian_soliton(3));
            let mut worst: f64 = 0.0;
            for i in 0..10 {
                for j in 0..10 {
                    let rho = 0.1 + 0.2 * i as f64;
                    let tau = 0.05 + 0.1 * j as f64;
                    worst = worst.max((f.reduced_distance(rho, tau)? - rho * rho / (4.0 * tau)).abs());
                }
            }
            let mut out = vec![Check::at_most("flat-ell-grid/gaussian", worst, 1e-8 * c.tol_scale)];
            for tau in [0.1, 0.5, 1.0] {
                let th = f.reduced_volume(tau)?;
                out.push(Check::close(format!("theta/gaussian/tau={tau}"), th.value, 1.0, 1e-6 * c.tol_scale, th.error));
            }
            let mut g1: f64 = 0.0;
            let mut g2: f64 = 0.0;
            for (rho, tau) in [(0.3, 0.1), (0.8, 0.4), (1.5, 0.9)] {
                let (a, b) = f.gauss_identity_residuals(rho, tau, crate::numerics::FD_STEP)?;
                g1 = g1.max(a);
                g2 = g2.max(b);
            }
            out.push(Check::at_most("gauss-gradient/gaussian", g1, 1e-6 * c.tol_scale));
            out.push(Check::at_most("gauss-time/gaussian", g2, 1e-6 * c.tol_scale));
            Ok(out)
        }),
        task("sphere-ell", "shrinking-s3", |c| {
            let g = s3();
            let f = ReducedDistanceField::new(g.clone());
            let mut worst: f64 = 0.0;
            let mut g1: f64 = 0.0;
            let mut g2: f64 = 0.0;
            for (rho, tau) in [(0.2, 0.05), (0.7, 0.1), (1.2, 0.2), (2.0, 0.3)] {
                worst = worst.max((f.reduced_distance(rho, tau)? - sphere_ell_closed_form(&g, rho, tau)).abs());
                let (a, b) = f.gauss_identity_residuals(rho, tau, crate::numerics::FD_STEP)?;
                g1 = g1.max(a);
                g2 = g2.max(b);
            }
            let k = Kernel::sub_heat(Arc::new(f));
            let sub = [(0.3, 0.1), (0.9, 0.2)]
                .iter()
                .map(|&(rho, tau)| k.conjugate_heat_residual(rho, tau, 1e-3))
                .collect::<Result<Vec<f64>>>()?;
            Ok(vec![
                Check::at_most("ell-closed-form/shrinking-s3", worst, 1e-8 * c.tol_scale),
                Check::at_most("gauss-gradient/shrinking-s3", g1, 1e-6 * c.tol_scale),
                Check::at_most("gauss-time/shrinking-s3", g2, 1e-6 * c.tol_scale),
                Check::at_least("sub-heat-subsolution/shrinking-s3", -sub.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 0.0, 1e-6 * c.tol_scale)
                    .with_note("value is -max (d/dtau - Delta + R) K"),
            ])
        }),
    ]
}

fn tasks_for(suite: Suite) -> Vec<Task> {
    match suite {
        Suite::Elliptic => elliptic_tasks(),
        Suite::Parabolic => parabolic_tasks(),
        Suite::Ricci => ricci_tasks(),
        Suite::Mcf => mcf_tasks(),
        Suite::Reduced => reduced_tasks(),
        Suite::All => Suite::BATTERIES.into_iter().flat_map(tasks_for).collect(),
    }
}

/// Geometry tags available in a suite.
pub fn geometry_tags(suite: Suite) -> Vec<&'static str> {
    let mut tags: Vec<&'static str> = tasks_for(suite).iter().map(|t| t.geometry).collect();
    tags.dedup();
    tags.sort_unstable();
    tags.dedup();
    tags
}

/// Runs a battery. A failing computation becomes a failed check; an empty
/// selection is a usage error.
pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteReport> {
    if !(config.tol_scale > 0.0 && config.tol_scale.is_finite()) {
        return Err(MvError::Usage(format!("tol-scale must be positive, got {}", config.tol_scale)));
    }
    let start = Instant::now();
    let tasks: Vec<Task> = tasks_for(suite)
        .into_iter()
        .filter(|t| config.geometry.as_deref().map_or(true, |g| canonical_tag(g) == t.geometry))
        .collect();
    if tasks.is_empty() {
        return Err(MvError::Usage(format!(
            "suite {} has no checks on geometry '{}' (available: {})",
            suite.as_str(),
            config.geometry.as_deref().unwrap_or(""),
            geometry_tags(suite).join(", ")
        )));
    }
    let results: Vec<Vec<Check>> = tasks
        .par_iter()
        .map(|t| match (t.run)(config) {
            Ok(checks) => checks,
            Err(e) => vec![Check::failed(format!("{}/{}", t.name, t.geometry), &e)],
        })
        .collect();
    let checks = results.into_iter().flatten().collect();
    Ok(SuiteReport::new(suite.as_str(), checks, start.elapsed().as_millis() as u64))
}

/// Maps geometry aliases onto the tags used by the batteries.
pub fn canonical_tag(name: &str) -> &str {
    match name {
        "euclidean" => "euclidean3",
        "hyperbolic" => "hyperbolic3",
        "shrinking-sphere" => "shrinking-s3",
        "gaussian-soliton" => "gaussian",
        other => other,
    }
}
