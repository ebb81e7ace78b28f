//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// `∫_a^b f` to absolute tolerance `tol` (Richardson-corrected adaptive
/// Simpson). `b < a` is allowed and flips the sign.
pub fn simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(
        &mut f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        tol.max(f64::MIN_POSITIVE),
        MAX_DEPTH,
    )
}

#[allow(clippy::too_many_arguments)]
fn step<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (m - a).abs() <= f64::EPSILON * m.abs().max(1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure { a, b });
    }
    Ok(step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v = simpson(|x| Ok(x.sin()), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        let v = simpson(|x| Ok((-x * x).exp()), 1.0, -1.0, 1e-13).unwrap();
        assert!((v + 1.493_648_265_624_854).abs() < 1e-12);
        // exact on cubics
        let v = simpson(|x| Ok(x * x * x - x), 0.0, 2.0, 1e-3).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn propagates_integrand_errors() {
        let r = simpson(
            |x| {
                if x > 0.5 {
                    Err(Error::OutsideInterval { y: x })
                } else {
                    Ok(1.0)
                }
            },
            0.0,
            1.0,
            1e-8,
        );
        assert!(r.is_err());
    }
}
