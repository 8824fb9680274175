//! Discrete dynamics of one-dimensional maps: fixed points, 2-cycles,
//! orbits, interval images and the period-doubling dichotomy for maps with
//! negative Schwarzian derivative.

use alloc::vec::Vec;

use crate::classify::{invariant_attracting_interval, MapClass, MapKind};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::maps::Feedback;
use crate::roots::{bisect, newton_polish};

const BISECT_TOL: f64 = 1e-13;
const NEWTON_STEPS: usize = 5;
/// `|f'(K)|` within this of 1 counts as the non-expanding case.
pub const UNIT_SLOPE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub k: f64,
    pub derivative_at_k: f64,
    /// `|f(K) - K|`
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoCycle {
    pub alpha: f64,
    pub beta: f64,
    /// `(|f(alpha) - beta|, |f(beta) - alpha|)`
    pub residuals: (f64, f64),
}

impl TwoCycle {
    pub fn as_interval(&self) -> Interval {
        Interval::new(self.alpha, self.beta)
    }

    /// `(f^2)'(alpha) = f'(alpha) f'(beta)`.
    pub fn multiplier<M: Feedback + ?Sized>(&self, map: &M) -> f64 {
        map.bundle(self.alpha).f1 * map.bundle(self.beta).f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DichotomyCase {
    GloballyAttractingFixedPoint,
    GloballyAttractingTwoCycle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DichotomyVerdict {
    pub case: DichotomyCase,
    pub fixed_point: FixedPoint,
    pub two_cycle: Option<TwoCycle>,
}

/// Solves `f(K) = K` on `bracket` by bisection followed by a Newton polish.
pub fn find_fixed_point<M: Feedback + ?Sized>(map: &M, bracket: Interval) -> Result<FixedPoint> {
    let domain = map.domain();
    if !domain.contains(bracket.lo) {
        return Err(Error::Domain { x: bracket.lo });
    }
    if !domain.contains(bracket.hi) {
        return Err(Error::Domain { x: bracket.hi });
    }
    let g = |x: f64| map.apply(x) - x;
    let rough = bisect(g, bracket.lo, bracket.hi, BISECT_TOL)?;
    let k = newton_polish(g, |x| map.bundle(x).f1 - 1.0, rough, bracket.lo, bracket.hi, NEWTON_STEPS);
    Ok(FixedPoint { k, derivative_at_k: map.bundle(k).f1, residual: g(k).abs() })
}

/// The 2-cycle of a decreasing map on its invariant interval `[A, B]`,
/// found as the fixed point of `f^2` in `[A, K - delta]`.
///
/// Only meaningful when `|f'(K)| > 1`.
pub fn two_cycle_in<M: Feedback + ?Sized>(map: &M, interval: Interval, fixed: &FixedPoint) -> Result<TwoCycle> {
    let k = fixed.k;
    let h = |x: f64| map.apply(map.apply(x)) - x;
    let mut delta = 1e-8 * interval.width();
    // f^2(x) - x < 0 just left of K when (f^2)'(K) > 1; widen the exclusion if
    // rounding hides that.
    while !(h(k - delta) < 0.0) {
        delta *= 10.0;
        if k - delta <= interval.lo {
            return Err(Error::NoSignChange { lo: interval.lo, hi: k });
        }
    }
    let hi = k - delta;
    let rough = bisect(h, interval.lo, hi, BISECT_TOL)?;
    let dh = |x: f64| map.bundle(map.apply(x)).f1 * map.bundle(x).f1 - 1.0;
    let alpha = newton_polish(h, dh, rough, interval.lo, hi, NEWTON_STEPS);
    let beta = map.apply(alpha);
    let back = map.apply(beta);
    Ok(TwoCycle { alpha, beta, residuals: ((map.apply(alpha) - beta).abs(), (back - alpha).abs()) })
}

/// Invariant interval and fixed point of an S-map, or of an SU-map on its
/// S-map subinterval.
fn decreasing_core<M: Feedback + ?Sized>(map: &M, class: &MapClass) -> Result<(Interval, FixedPoint)> {
    match class.kind {
        MapKind::Neither => Err(Error::Classification("map is neither an S-map nor an SU-map")),
        MapKind::SMap => {
            let iv = invariant_attracting_interval(map, class)?;
            Ok((iv, find_fixed_point(map, iv)?))
        }
        MapKind::SUMap => {
            let iv = invariant_attracting_interval(map, class).map_err(|_| Error::NotDecidable)?;
            Ok((iv, find_fixed_point(map, iv)?))
        }
    }
}

/// The globally attracting 2-cycle, or `None` when `|f'(K)| <= 1`.
pub fn find_two_cycle<M: Feedback + ?Sized>(map: &M, class: &MapClass) -> Result<Option<TwoCycle>> {
    let (iv, fp) = decreasing_core(map, class)?;
    if fp.derivative_at_k.abs() <= 1.0 + UNIT_SLOPE_SLACK {
        return Ok(None);
    }
    two_cycle_in(map, iv, &fp).map(Some)
}

/// `[x0, f(x0), ..., f^n(x0)]`.
pub fn iterate<M: Feedback + ?Sized>(map: &M, x0: f64, n: usize) -> Result<Vec<f64>> {
    let domain = map.domain();
    if !domain.contains(x0) {
        return Err(Error::Domain { x: x0 });
    }
    let mut orbit = Vec::with_capacity(n + 1);
    orbit.push(x0);
    let mut x = x0;
    for step in 1..=n {
        x = map.apply(x);
        if !x.is_finite() || !domain.contains(x) {
            return Err(Error::DomainEscape { step, x });
        }
        orbit.push(x);
    }
    Ok(orbit)
}

/// Limits of the even and odd orbit subsequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitLimit {
    /// Last even-index iterate.
    pub even: f64,
    /// Last odd-index iterate.
    pub odd: f64,
    pub steps: usize,
    pub converged: bool,
}

/// Iterates until both parity subsequences stall
/// (`|x_{n+2} - x_n| < 1e-14 max(1, |x_n|)`) or `max_steps` is reached.
pub fn orbit_limit<M: Feedback + ?Sized>(map: &M, x0: f64, max_steps: usize) -> Result<OrbitLimit> {
    let domain = map.domain();
    if !domain.contains(x0) {
        return Err(Error::Domain { x: x0 });
    }
    let stalled = |a: f64, b: f64| (b - a).abs() < 1e-14 * a.abs().max(1.0);
    let (mut prev2, mut prev1) = (x0, map.apply(x0));
    let mut quiet = 0;
    let mut step = 1;
    while step < max_steps {
        let next = map.apply(prev1);
        step += 1;
        if !next.is_finite() || !domain.contains(next) {
            return Err(Error::DomainEscape { step, x: next });
        }
        quiet = if stalled(prev2, next) { quiet + 1 } else { 0 };
        prev2 = prev1;
        prev1 = next;
        if quiet >= 2 {
            break;
        }
    }
    let (even, odd) = if step % 2 == 0 { (prev1, prev2) } else { (prev2, prev1) };
    Ok(OrbitLimit { even, odd, steps: step, converged: quiet >= 2 })
}

/// Image `f(iv)`: the extremes over the endpoints and, when it lies inside,
/// the critical point.
pub fn interval_image<M: Feedback + ?Sized>(map: &M, iv: Interval) -> Result<Interval> {
    let a = map.eval(iv.lo)?;
    let b = map.eval(iv.hi)?;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    if let Some(x0) = map.critical_point().filter(|x0| iv.lo < *x0 && *x0 < iv.hi) {
        let c = map.eval(x0)?;
        lo = lo.min(c);
        hi = hi.max(c);
    }
    Ok(Interval { lo, hi })
}

/// Singer-type dichotomy: a globally attracting fixed point when
/// `|f'(K)| <= 1`, otherwise a globally attracting 2-cycle.
pub fn singer_dichotomy<M: Feedback + ?Sized>(map: &M, class: &MapClass) -> Result<DichotomyVerdict> {
    let (iv, fp) = decreasing_core(map, class)?;
    if fp.derivative_at_k.abs() <= 1.0 + UNIT_SLOPE_SLACK {
        return Ok(DichotomyVerdict {
            case: DichotomyCase::GloballyAttractingFixedPoint,
            fixed_point: fp,
            two_cycle: None,
        });
    }
    let cycle = two_cycle_in(map, iv, &fp)?;
    Ok(DichotomyVerdict {
        case: DichotomyCase::GloballyAttractingTwoCycle,
        fixed_point: fp,
        two_cycle: Some(cycle),
    })
}
