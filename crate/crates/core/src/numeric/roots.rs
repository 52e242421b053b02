//! Bracketed inversion of increasing maps and sign-change location.

use crate::error::{Error, Result};

pub const DEFAULT_INVERT_TOL: f64 = 1e-12;

const MAX_ITER: usize = 300;

/// Solves `F(y) = target` for an increasing `F` on `bracket`.
///
/// Secant steps are taken from the two most recent iterates and accepted
/// only while they stay strictly inside the current bracket and the
/// bracket keeps halving at least every other step; otherwise the step
/// bisects. Returns as soon as `|F(y) - target| <= tol` or the bracket has
/// collapsed to a few ulps.
pub fn invert_monotone<F: Fn(f64) -> f64 + ?Sized>(f: &F, target: f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    let mut flo = f(lo) - target;
    let mut fhi = f(hi) - target;
    if !flo.is_finite() {
        return Err(Error::NonFinite { x: lo });
    }
    if !fhi.is_finite() {
        return Err(Error::NonFinite { x: hi });
    }
    if flo > tol || fhi < -tol {
        return Err(Error::NotBracketed { target, lo, hi });
    }
    if flo.abs() <= tol {
        return Ok(lo);
    }
    if fhi.abs() <= tol {
        return Ok(hi);
    }

    let (mut x0, mut h0) = (lo, flo);
    let (mut x1, mut h1) = (hi, fhi);
    let mut width = hi - lo;
    let mut slow = 0;
    for _ in 0..MAX_ITER {
        let secant = if h1 != h0 {
            x1 - h1 * (x1 - x0) / (h1 - h0)
        } else {
            f64::NAN
        };
        let mid = 0.5 * (lo + hi);
        let x = if secant > lo && secant < hi && slow < 2 {
            secant
        } else {
            mid
        };
        let h = f(x) - target;
        if !h.is_finite() {
            return Err(Error::NonFinite { x });
        }
        if h.abs() <= tol {
            return Ok(x);
        }
        if h < 0.0 {
            lo = x;
            flo = h;
        } else {
            hi = x;
            fhi = h;
        }
        x0 = x1;
        h0 = h1;
        x1 = x;
        h1 = h;
        if hi - lo > 0.5 * width {
            slow += 1;
        } else {
            slow = 0;
            width = hi - lo;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(if flo.abs() < fhi.abs() { lo } else { hi })
}

/// Bisects a sign change of `g` on `[a, b]` (requires `g(a)·g(b) <= 0`).
pub fn bisect_root<G: Fn(f64) -> f64 + ?Sized>(g: &G, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Locates the sign changes of `g` on `[lo, hi]` by scanning `samples`
/// uniform panels and bisecting each panel that changes sign.
pub fn sign_changes<G: Fn(f64) -> f64 + ?Sized>(g: &G, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(1);
    let mut roots = Vec::new();
    let mut xa = lo;
    let mut ga = g(lo);
    if ga == 0.0 {
        roots.push(lo);
    }
    for i in 1..=n {
        let xb = lo + (hi - lo) * i as f64 / n as f64;
        let gb = g(xb);
        if gb == 0.0 {
            roots.push(xb);
        } else if ga != 0.0 && (ga < 0.0) != (gb < 0.0) && ga.is_finite() && gb.is_finite() {
            roots.push(bisect_root(g, xa, xb));
        }
        xa = xb;
        ga = gb;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_square() {
        let y = invert_monotone(&|y: f64| y * y / 2.0, 2.0, (0.0, 10.0), 1e-12).unwrap();
        assert!((y - 2.0).abs() < 1e-10);
    }

    #[test]
    fn logarithm() {
        let y = invert_monotone(&|y: f64| y.ln(), 1.0, (1.0, 10.0), 1e-12).unwrap();
        assert!((y - std::f64::consts::E).abs() < 1e-11);
    }

    #[test]
    fn target_outside_image() {
        let err = invert_monotone(&|y: f64| y, 20.0, (0.0, 10.0), 1e-12).unwrap_err();
        assert!(matches!(err, Error::NotBracketed { .. }));
    }

    #[test]
    fn steep_map_terminates() {
        let y = invert_monotone(&|y: f64| (50.0 * y).exp(), 3.0, (-1.0, 1.0), 1e-12).unwrap();
        assert!(((50.0 * y).exp() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn sign_changes_of_sine() {
        let r = sign_changes(&|x: f64| x.sin(), 0.5, 10.0, 64);
        assert_eq!(r.len(), 3);
        for (k, x) in r.iter().enumerate() {
            assert!((x - (k + 1) as f64 * std::f64::consts::PI).abs() < 1e-12);
        }
    }
}
