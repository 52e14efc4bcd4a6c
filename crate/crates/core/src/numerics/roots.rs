//! Bracketed scalar root finding (Brent's hybrid bisection / secant / inverse
//! quadratic interpolation).

use crate::error::{MvError, Result};

/// Finds a root of `f` in `[a, b]`, where `f(a)` and `f(b)` differ in sign.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    brent_with_values(f, a, fa, b, fb, xtol)
}

/// As [`brent`], reusing already known endpoint values.
pub fn brent_with_values<F>(mut f: F, a: f64, fa: f64, b: f64, fb: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut fa, mut b, mut fb) = (a, fa, b, fb);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(MvError::NoRegion(format!("root not bracketed in [{a}, {b}]")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Ok(b)
}

/// Expands `hi` geometrically (never beyond `limit`) until `f(hi)` changes
/// sign relative to `f(lo)`. Returns the bracket and endpoint values.
pub fn expand_bracket<F>(mut f: F, lo: f64, hi: f64, factor: f64, limit: f64) -> Result<(f64, f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let flo = f(lo)?;
    let mut a = lo;
    let mut fa = flo;
    let mut b = hi.min(limit);
    loop {
        let fb = f(b)?;
        if fb.signum() != fa.signum() || fb == 0.0 {
            return Ok((a, fa, b, fb));
        }
        if b >= limit {
            return Err(MvError::NoRegion(format!("no sign change up to {limit}")));
        }
        a = b;
        fa = fb;
        b = (b * factor).min(limit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = brent(|x| Ok(x * x * x - 2.0), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn unbracketed_is_error() {
        assert!(brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn expansion_finds_sign_change() {
        let (a, _, b, _) = expand_bracket(|x| Ok(10.0 - x), 0.0, 1.0, 2.0, 100.0).unwrap();
        assert!(a < 10.0 && b >= 10.0);
        assert!(expand_bracket(|x| Ok(1000.0 - x), 0.0, 1.0, 2.0, 100.0).is_err());
    }
}
