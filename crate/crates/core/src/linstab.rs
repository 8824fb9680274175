//! Local stability of the equilibrium through the characteristic function
//! `chi(lambda) = lambda + a - b e^{-lambda tau}` with `b = f'(K) < 0`.
//!
//! With the delay scaled to one (`lambda -> lambda tau`) this is
//! `a tau + lambda - b tau e^{-lambda}`; the delay is kept explicit here.

use core::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::roots::bisect;

/// Samples per rectangle edge before adaptive refinement (4096 in total).
pub const EDGE_SAMPLES: usize = 1024;
const MAX_ARG_STEP: f64 = PI / 2.0;
const MAX_DEPTH: u32 = 40;
const CONTOUR_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    pub a: f64,
    pub b: f64,
    pub tau: f64,
}

impl Linearization {
    pub fn new(a: f64, b: f64, tau: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter("a must be finite and nonnegative"));
        }
        if !(b < 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter("b must be finite and negative"));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter("tau must be positive"));
        }
        Ok(Linearization { a, b, tau })
    }

    /// `chi(x + iy)` as `(re, im)`.
    pub fn chi(&self, x: f64, y: f64) -> (f64, f64) {
        let damp = self.b * libm::exp(-x * self.tau);
        let (s, c) = libm::sincos(y * self.tau);
        (x + self.a - damp * c, y + damp * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityResult {
    pub locally_stable: bool,
    pub tau0: Option<f64>,
    /// Roots with `Re > 0` and `Im > 0`.
    pub n: usize,
}

/// First delay at which a root reaches the imaginary axis:
/// `arccos(a/b) / sqrt(b^2 - a^2)`, or `None` when `|b| <= a`.
pub fn critical_delay(a: f64, b: f64) -> Result<Option<f64>> {
    if !(b < 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter("b must be finite and negative"));
    }
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter("a must be finite and nonnegative"));
    }
    if -b <= a {
        return Ok(None);
    }
    Ok(Some(libm::acos(a / b) / libm::sqrt(b * b - a * a)))
}

/// The feedback strength `|b|` at which `tau` is the critical delay.
/// Found by bisection on [`critical_delay`], which decreases in `|b|`.
pub fn critical_feedback(a: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter("tau must be positive"));
    }
    let gap = |s: f64| critical_delay(a, -s).map(|t| t.unwrap_or(f64::INFINITY) - tau).unwrap_or(f64::NAN);
    let lo = a + 1e-12 * a.max(1.0);
    let mut hi = (a + 1.0) * 2.0;
    while gap(hi) > 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoSignChange { lo, hi });
        }
    }
    bisect(gap, lo, hi, 1e-15 * hi)
}

/// Total change of `arg chi` along the segment from `p` to `q`, sampled
/// adaptively so that no step exceeds `pi/2`.
fn arg_change(lin: &Linearization, p: (f64, f64), q: (f64, f64), samples: usize) -> Result<f64> {
    let at = |s: f64| {
        let x = p.0 + s * (q.0 - p.0);
        let y = p.1 + s * (q.1 - p.1);
        let (re, im) = lin.chi(x, y);
        if libm::hypot(re, im) < CONTOUR_ZERO {
            Err(Error::ContourRoot { re: x, im: y })
        } else {
            Ok(libm::atan2(im, re))
        }
    };
    let wrap = |d: f64| {
        let mut d = libm::fmod(d, TAU);
        if d > PI {
            d -= TAU;
        } else if d < -PI {
            d += TAU;
        }
        d
    };
    let mut total = 0.0;
    let mut stack = alloc::vec::Vec::new();
    let mut prev = at(0.0)?;
    for i in 1..=samples {
        let s1 = i as f64 / samples as f64;
        let s0 = (i - 1) as f64 / samples as f64;
        let next = at(s1)?;
        stack.push((s0, prev, s1, next, 0u32));
        while let Some((s0, a0, s1, a1, depth)) = stack.pop() {
            let d = wrap(a1 - a0);
            if d.abs() < MAX_ARG_STEP || depth >= MAX_DEPTH {
                total += d;
                continue;
            }
            let sm = 0.5 * (s0 + s1);
            let am = at(sm)?;
            // right half first so the left half is summed first
            stack.push((sm, am, s1, a1, depth + 1));
            stack.push((s0, a0, sm, am, depth + 1));
        }
        prev = next;
    }
    Ok(total)
}

fn winding(lin: &Linearization, eps: f64, r: f64) -> Result<usize> {
    let corners = [(eps, eps), (r, eps), (r, r), (eps, r)];
    let mut total = 0.0;
    for i in 0..4 {
        total += arg_change(lin, corners[i], corners[(i + 1) % 4], EDGE_SAMPLES)?;
    }
    let turns = libm::round(total / TAU);
    if !(turns >= 0.0) || (total / TAU - turns).abs() > 1e-6 {
        return Err(Error::NotDecidable);
    }
    Ok(turns as usize)
}

/// Number of characteristic roots with `Re > 0` and `Im > 0`, by the
/// argument principle on `[eps, R] x [eps, R]` with `R = a + |b| + 1`.
///
/// Every root with `Re >= 0` has modulus at most `a + |b|`, so the rectangle
/// encloses all of them. If `chi` vanishes on the contour, the offset from
/// the axes is perturbed once before giving up.
pub fn count_unstable_pairs(lin: &Linearization) -> Result<usize> {
    let lin = Linearization::new(lin.a, lin.b, lin.tau)?;
    let scale = lin.a + lin.b.abs();
    let eps = 1e-6 * scale;
    let r = scale + 1.0;
    match winding(&lin, eps, r) {
        Err(Error::ContourRoot { .. }) => winding(&lin, eps + 1e-6, r + 1e-6),
        other => other,
    }
}

/// `N`, the critical delay and the local-stability verdict.
pub fn stability(lin: &Linearization) -> Result<StabilityResult> {
    let n = count_unstable_pairs(lin)?;
    let tau0 = critical_delay(lin.a, lin.b)?;
    let on_axis = tau0.is_some_and(|t0| (lin.tau - t0).abs() <= 1e-12 * t0);
    Ok(StabilityResult { locally_stable: n == 0 && !on_axis, tau0, n })
}
