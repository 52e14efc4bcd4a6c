//! Adaptive Gauss–Kronrod quadrature with error estimates.
//!
//! The 1-D engine is a globally adaptive G7/K15 scheme in the style of
//! QUADPACK's QAG: the interval with the largest error estimate is bisected
//! until the summed estimate meets the requested tolerance. Integrands are
//! fallible so that solver failures deep inside a kernel evaluation surface
//! as errors instead of NaNs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{MvError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Requested accuracy: converged when `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self { abs: self.abs * factor, rel: self.rel * factor }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-10, 1e-10)
    }
}

/// An integral value together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self { value: self.value * factor, error: self.error * factor.abs() }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate { value: self.value + rhs.value, error: self.error + rhs.error }
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;
    fn sub(self, rhs: Estimate) -> Estimate {
        Estimate { value: self.value - rhs.value, error: self.error + rhs.error }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
fn kronrod15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    if !resk.is_finite() {
        return Err(MvError::Accuracy { value: resk, error: f64::INFINITY });
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((value, err))
}

/// Globally adaptive quadrature of `f` over `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub tol: Tolerance,
    pub max_segments: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self { tol: Tolerance::default(), max_segments: 4000 }
    }
}

impl Integrator {
    pub fn new(tol: Tolerance) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn with_max_segments(mut self, n: usize) -> Self {
        self.max_segments = n;
        self
    }

    /// Integrates over `[a, b]` starting from the given interior breakpoints.
    pub fn integrate_with_breaks<F>(&self, mut f: F, a: f64, b: f64, breaks: &[f64]) -> Result<Estimate>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if a == b {
            return Ok(Estimate::exact(0.0));
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut points = vec![lo];
        points.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
        points.push(hi);
        points.sort_by(f64::total_cmp);

        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        for w in points.windows(2) {
            let (value, error) = kronrod15(&mut f, w[0], w[1])?;
            total += value;
            total_err += error;
            heap.push(Segment { a: w[0], b: w[1], value, error });
        }

        while total_err > self.tol.target(total) {
            if heap.len() >= self.max_segments {
                return Err(MvError::Accuracy { value: sign * total, error: total_err });
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-15 * worst.a.abs().max(worst.b.abs()) {
                // cannot split further; accept what we have
                heap.push(worst);
                break;
            }
            let (v1, e1) = kronrod15(&mut f, worst.a, mid)?;
            let (v2, e2) = kronrod15(&mut f, mid, worst.b)?;
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
            heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
            heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
            if heap.len() % 64 == 0 {
                // periodic resummation against drift
                total = heap.iter().map(|s| s.value).sum();
                total_err = heap.iter().map(|s| s.error).sum();
            }
        }
        let total: f64 = heap.iter().map(|s| s.value).sum();
        let total_err: f64 = heap.iter().map(|s| s.error).sum();
        Ok(Estimate::new(sign * total, total_err))
    }

    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<Estimate>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        self.integrate_with_breaks(f, a, b, &[])
    }

    /// Integrates an infallible integrand.
    pub fn integrate_fn<F>(&self, mut f: F, a: f64, b: f64) -> Result<Estimate>
    where
        F: FnMut(f64) -> f64,
    {
        self.integrate(|x| Ok(f(x)), a, b)
    }

    /// Integrates over `[a, ∞)` with the map `x = a + u / (1 - u)`.
    pub fn integrate_to_infinity<F>(&self, mut f: F, a: f64) -> Result<Estimate>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        self.integrate(
            |u| {
                let w = 1.0 - u;
                let x = a + u / w;
                let v = f(x)?;
                Ok(if v == 0.0 { 0.0 } else { v / (w * w) })
            },
            0.0,
            1.0,
        )
    }
}

/// Maps `s ∈ [0, 1]` onto `[0, len]` with `t = len (1 - cos πs) / 2`, which
/// turns square-root endpoint behaviour into smooth integrands.
pub fn cosine_map(s: f64, len: f64) -> (f64, f64) {
    let t = 0.5 * len * (1.0 - (std::f64::consts::PI * s).cos());
    let dt = 0.5 * len * std::f64::consts::PI * (std::f64::consts::PI * s).sin();
    (t, dt)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..order {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = order as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[order - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = Integrator::default().integrate_fn(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-13);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let q = Integrator::new(Tolerance::new(1e-12, 1e-12))
            .integrate_fn(|x| 1.0 / x.sqrt(), 0.0, 1.0)
            .unwrap();
        assert!((q.value - 2.0).abs() < 1e-10, "{q:?}");
    }

    #[test]
    fn gaussian_to_infinity() {
        let q = Integrator::default()
            .integrate_to_infinity(|x| Ok((-x * x).exp()), 0.0)
            .unwrap();
        assert!((q.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let q = Integrator::default().integrate_fn(|x| x.exp(), 1.0, 0.0).unwrap();
        assert!((q.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn nonconvergence_reports_estimate() {
        let r = Integrator::new(Tolerance::new(1e-14, 0.0))
            .with_max_segments(4)
            .integrate_fn(|x| (1.0 / x).sin(), 1e-6, 1.0);
        match r {
            Err(MvError::Accuracy { error, .. }) => assert!(error > 0.0),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn gauss_legendre_integrates_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn cosine_map_covers_interval() {
        let q = Integrator::default()
            .integrate_fn(
                |s| {
                    let (t, dt) = cosine_map(s, 3.0);
                    t.sqrt() * dt
                },
                0.0,
                1.0,
            )
            .unwrap();
        assert!((q.value - 2.0 * 3f64.powf(1.5) / 3.0).abs() < 1e-11);
    }
}
