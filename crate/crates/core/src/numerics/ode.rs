//! Dormand–Prince 5(4) integrator with adaptive step control.

use crate::error::{MvError, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_steps: 100_000 }
    }
}

/// Accepted steps of an integration, including the initial point.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.times.last().unwrap(), *self.states.last().unwrap())
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1`. The right-hand side may
/// fail (for example on leaving the domain), which aborts the integration
/// with a solver error carrying the time reached.
pub fn dopri5<const N: usize, F>(mut rhs: F, t0: f64, y0: [f64; N], t1: f64, opts: &OdeOptions) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> std::result::Result<[f64; N], String>,
{
    let span = t1 - t0;
    let mut traj = Trajectory { times: vec![t0], states: vec![y0] };
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = span.signum();
    let fail = |t: f64, reason: String| MvError::Solver { sigma: t, reason };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y).map_err(|e| fail(t, e))?;
    let mut h = dir * span.abs() / 32.0;
    let mut steps = 0usize;

    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(fail(t, "step budget exhausted".into()));
        }
        if ((t + h) - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)])).map_err(|e| fail(t, e))?;
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)])).map_err(|e| fail(t, e))?;
        let k4 = rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)])).map_err(|e| fail(t, e))?;
        let k5 = rhs(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))
            .map_err(|e| fail(t, e))?;
        let k6 = rhs(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))
            .map_err(|e| fail(t, e))?;
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + h, &y_new).map_err(|e| fail(t + h, e))?;

        let mut err = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            return Err(fail(t, "non-finite state".into()));
        }

        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
            traj.times.push(t);
            traj.states.push(y);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(fail(t, "step size underflow".into()));
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let traj = dopri5(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 2.0, &OdeOptions::default()).unwrap();
        let (t, y) = traj.last();
        assert_eq!(t, 2.0);
        assert!((y[0] - 2f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn harmonic_oscillator_conserves_energy() {
        let traj =
            dopri5(|_, y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, [1.0, 0.0], 10.0, &OdeOptions::default()).unwrap();
        let (_, y) = traj.last();
        assert!((y[0] - 10f64.cos()).abs() < 1e-8);
        assert!((y[0] * y[0] + y[1] * y[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn domain_exit_reports_time() {
        let r = dopri5(
            |t, _y: &[f64; 1]| if t > 0.5 { Err("left domain".to_string()) } else { Ok([1.0]) },
            0.0,
            [0.0],
            1.0,
            &OdeOptions::default(),
        );
        match r {
            Err(MvError::Solver { sigma, .. }) => assert!(sigma <= 0.5 + 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
