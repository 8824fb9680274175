//! Bracketing root finders used throughout the crate.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// A zero hit exactly at an endpoint is returned immediately.
pub fn bisect<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if !(g_lo.is_finite() && g_hi.is_finite()) || (g_lo < 0.0) == (g_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    // 200 halvings exhaust any f64 bracket.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton polish that only accepts steps staying inside `bracket` and
/// strictly reducing `|g|`.
pub fn newton_polish<F, D>(g: F, dg: D, mut x: f64, lo: f64, hi: f64, max_steps: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut gx = g(x);
    for _ in 0..max_steps {
        if gx == 0.0 {
            break;
        }
        let d = dg(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - gx / d;
        if !(lo..=hi).contains(&next) {
            break;
        }
        let g_next = g(next);
        if !(g_next.abs() < gx.abs()) {
            break;
        }
        x = next;
        gx = g_next;
    }
    x
}

/// Golden-section maximisation of a unimodal-ish function on `[lo, hi]`.
/// Returns `(argmax, max)`, compared against the endpoints as well.
pub(crate) fn maximize<F: Fn(f64) -> f64>(h: F, lo: f64, hi: f64, iterations: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut hc, mut hd) = (h(c), h(d));
    for _ in 0..iterations {
        if hc > hd {
            b = d;
            d = c;
            hd = hc;
            c = b - INV_PHI * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + INV_PHI * (b - a);
            hd = h(d);
        }
    }
    let mut best = if hc > hd { (c, hc) } else { (d, hd) };
    for x in [lo, hi] {
        let hx = h(x);
        if hx > best.1 {
            best = (x, hx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        assert_eq!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoSignChange { lo: -1.0, hi: 1.0 })
        );
    }

    #[test]
    fn polish_improves_rough_root() {
        let g = |x: f64| x * x - 2.0;
        let x = newton_polish(g, |x| 2.0 * x, 1.4, 1.0, 2.0, 5);
        assert!(g(x).abs() < 1e-14);
    }

    #[test]
    fn maximize_quadratic() {
        let (x, v) = maximize(|x| -(x - 0.3) * (x - 0.3), -1.0, 1.0, 80);
        assert!((x - 0.3).abs() < 1e-7);
        assert!(v.abs() < 1e-14);
    }
}
