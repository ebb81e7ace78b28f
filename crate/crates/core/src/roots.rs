//! Scalar root finding: geometric bracket expansion around a seed followed by
//! Brent's method.

/// Expands `[seed - w, seed + w]` with `w` doubling (at most `max_expansions`
/// times) until `f` changes sign, returning the bracket.
pub fn expand_bracket<F>(
    f: &mut F,
    seed: f64,
    width: f64,
    max_expansions: u32,
) -> Option<(f64, f64, f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let f0 = f(seed);
    let mut w = width;
    for _ in 0..max_expansions {
        let (a, b) = (seed - w, seed + w);
        let (fa, fb) = (f(a), f(b));
        // keep the narrowest sign change: seed to one side first
        if f0.is_finite() && fb.is_finite() && f0.signum() != fb.signum() {
            return Some((seed, f0, b, fb));
        }
        if f0.is_finite() && fa.is_finite() && f0.signum() != fa.signum() {
            return Some((a, fa, seed, f0));
        }
        if fa.is_finite() && fb.is_finite() && fa.signum() != fb.signum() {
            return Some((a, fa, b, fb));
        }
        w *= 2.0;
    }
    None
}

/// Brent's method on a sign-changing bracket. Returns the root to within
/// `xtol` (absolute) or an exact zero.
pub fn brent<F>(
    f: &mut F,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    xtol: f64,
    max_iter: u32,
) -> f64
where
    F: FnMut(f64) -> f64,
{
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..max_iter {
        if fb == 0.0 || (b - a).abs() <= xtol {
            return b;
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let q = (3.0 * a + b) / 4.0;
        let out_of_range = !((s > q.min(b) && s < q.max(b)) || s == b);
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0
        };
        let tiny = if bisected {
            (b - c).abs() < xtol
        } else {
            (c - d).abs() < xtol
        };
        if out_of_range || slow || tiny || !s.is_finite() {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    b
}

/// Root of `f` near `seed`, or `None` when no sign change is found.
pub fn find_root_near<F>(mut f: F, seed: f64, width: f64, xtol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let (a, fa, b, fb) = expand_bracket(&mut f, seed, width, 64)?;
    Some(brent(&mut f, a, fa, b, fb, xtol, 200))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_roots() {
        let r = find_root_near(|x| x * x - 2.0, 1.0, 0.1, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let r = find_root_near(|x| x.cos() - x, 0.0, 1e-3, 1e-15).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-14);
        // far seed needs many doublings
        let r = find_root_near(|x| 3.0 * x - 1e6, 0.0, 1e-3, 1e-9).unwrap();
        assert!((r - 1e6 / 3.0).abs() < 1e-6);
        assert!(find_root_near(|x| x * x + 1.0, 0.0, 1.0, 1e-12).is_none());
    }
}
