//! Grid-certified classification of feedback maps as S-maps or SU-maps.
//!
//! The sign conditions are checked on a uniform grid followed by one
//! refinement pass: every interior grid point where `f'` or `Sf` has a local
//! maximum (the place a sign change would hide) is re-examined by a
//! golden-section search over its two neighbouring cells. This is a numerical
//! certificate, not a proof.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::maps::Feedback;
use crate::onedim::{find_fixed_point, FixedPoint};
use crate::roots::{bisect, maximize};

/// Probe points used for the limit check of maps whose domain is unbounded.
pub const LIMIT_PROBE: f64 = 1e6;

const REFINE_ITERATIONS: usize = 80;
const RELATIVE_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    SMap,
    SUMap,
    Neither,
}

/// Which defining condition failed for a map classified as [`MapKind::Neither`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    DerivativeNotNegative,
    SchwarzianNotNegative,
    NoFiniteLimit,
    NotUnimodal,
    FixedPoint,
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapClass {
    pub kind: MapKind,
    /// `x0` for SU-maps.
    pub critical_point: Option<f64>,
    /// The interior fixed point of an SU-map.
    pub fixed_point: Option<f64>,
    /// `f(-inf)` or `f(+inf)` (or the value at a finite domain end) for S-maps.
    pub finite_limit: Option<f64>,
    pub witness: Option<f64>,
    pub violation: Option<Violation>,
}

impl MapClass {
    fn neither(violation: Violation, witness: Option<f64>) -> Self {
        MapClass {
            kind: MapKind::Neither,
            critical_point: None,
            fixed_point: None,
            finite_limit: None,
            witness,
            violation: Some(violation),
        }
    }
}

/// Classifies `map` on `probe` using `grid_size` cells (`grid_size + 1` points).
pub fn classify<M: Feedback + ?Sized>(map: &M, probe: Interval, grid_size: usize) -> Result<MapClass> {
    if grid_size < 64 {
        return Err(Error::InvalidParameter("grid_size must be at least 64"));
    }
    if !probe.is_bounded() || !(probe.lo < probe.hi) {
        return Err(Error::InvalidParameter("probe interval must be bounded and nondegenerate"));
    }
    let domain = map.domain();
    if !domain.contains(probe.lo) {
        return Err(Error::Domain { x: probe.lo });
    }
    if !domain.contains(probe.hi) {
        return Err(Error::Domain { x: probe.hi });
    }

    let step = probe.width() / grid_size as f64;
    let xs: alloc::vec::Vec<f64> = (0..=grid_size)
        .map(|i| if i == grid_size { probe.hi } else { probe.lo + i as f64 * step })
        .collect();
    let profile: alloc::vec::Vec<(f64, f64)> = xs.iter().map(|&x| map.slope_profile(x)).collect();

    let finite = |x: f64, (s, _): (f64, f64)| s.is_finite() && map.apply(x).is_finite();
    if let Some(i) = (0..xs.len()).find(|&i| !finite(xs[i], profile[i])) {
        return Ok(MapClass::neither(Violation::NonFinite, Some(xs[i])));
    }

    let slopes: alloc::vec::Vec<f64> = profile.iter().map(|p| p.0).collect();
    let schwarz: alloc::vec::Vec<f64> = profile.iter().map(|p| p.1).collect();
    if slopes.iter().any(|s| *s > 0.0) {
        classify_unimodal(map, &xs, &slopes, &schwarz)
    } else {
        classify_decreasing(map, &xs, &slopes, &schwarz)
    }
}

fn classify_decreasing<M: Feedback + ?Sized>(
    map: &M,
    xs: &[f64],
    slopes: &[f64],
    schwarz: &[f64],
) -> Result<MapClass> {
    // f' == 0 with a finite negative Sf is underflow of a steep power, not a critical point
    let underflow = |i: usize| slopes[i] == 0.0 && schwarz[i] < 0.0 && schwarz[i].is_finite();
    if let Some(i) = (0..xs.len()).find(|&i| !(slopes[i] < 0.0) && !underflow(i)) {
        return Ok(MapClass::neither(Violation::DerivativeNotNegative, Some(xs[i])));
    }
    if let Some(i) = schwarz.iter().position(|s| !(*s < 0.0)) {
        return Ok(MapClass::neither(Violation::SchwarzianNotNegative, Some(xs[i])));
    }

    let slope_scale = slopes.iter().map(|s| s.abs()).fold(0.0, f64::max);
    for i in 1..xs.len() - 1 {
        let (prev, here, next) = (slopes[i - 1], slopes[i], slopes[i + 1]);
        if here >= prev && here >= next && !underflow(i) {
            let (x, v) = maximize(|x| map.slope_profile(x).0, xs[i - 1], xs[i + 1], REFINE_ITERATIONS);
            if !(v < -RELATIVE_ZERO * slope_scale) {
                return Ok(MapClass::neither(Violation::DerivativeNotNegative, Some(x)));
            }
        }
        if schwarz[i] >= schwarz[i - 1] && schwarz[i] >= schwarz[i + 1] {
            let (x, v) = maximize(|x| map.slope_profile(x).1, xs[i - 1], xs[i + 1], REFINE_ITERATIONS);
            if !(v < 0.0) {
                return Ok(MapClass::neither(Violation::SchwarzianNotNegative, Some(x)));
            }
        }
    }

    let domain = map.domain();
    for p in [-LIMIT_PROBE, LIMIT_PROBE] {
        if !domain.contains(p) || (xs[0] <= p && p <= xs[xs.len() - 1]) {
            continue;
        }
        let (slope, s) = map.slope_profile(p);
        if !slope.is_finite() || slope == 0.0 {
            continue;
        }
        if slope > 0.0 {
            return Ok(MapClass::neither(Violation::DerivativeNotNegative, Some(p)));
        }
        if s.is_finite() && s >= 0.0 {
            return Ok(MapClass::neither(Violation::SchwarzianNotNegative, Some(p)));
        }
    }

    let finite_limit = map
        .left_limit()
        .filter(|c| c.is_finite())
        .or_else(|| map.right_limit().filter(|c| c.is_finite()));
    if finite_limit.is_none() && !domain.lo.is_finite() && !domain.hi.is_finite() {
        return Ok(MapClass::neither(Violation::NoFiniteLimit, None));
    }
    Ok(MapClass {
        kind: MapKind::SMap,
        critical_point: None,
        fixed_point: None,
        finite_limit,
        witness: None,
        violation: None,
    })
}

fn classify_unimodal<M: Feedback + ?Sized>(
    map: &M,
    xs: &[f64],
    slopes: &[f64],
    schwarz: &[f64],
) -> Result<MapClass> {
    // Expect a run of f' > 0, at most one exact zero, then f' < 0 to the end.
    let n = xs.len();
    let mut i = 0;
    while i < n && slopes[i] > 0.0 {
        i += 1;
    }
    if i == 0 {
        return Ok(MapClass::neither(Violation::NotUnimodal, Some(xs[0])));
    }
    if i == n {
        return Ok(MapClass::neither(Violation::DerivativeNotNegative, Some(xs[n - 1])));
    }
    let last_pos = i - 1;
    let x0 = if slopes[i] == 0.0 {
        let z = xs[i];
        i += 1;
        if i == n {
            return Ok(MapClass::neither(Violation::NotUnimodal, Some(z)));
        }
        z
    } else {
        bisect(|x| map.slope_profile(x).0, xs[last_pos], xs[i], 1e-14)?
    };
    if let Some(j) = (i..n).find(|&j| !(slopes[j] < 0.0)) {
        return Ok(MapClass::neither(Violation::NotUnimodal, Some(xs[j])));
    }

    // Sf may vanish at a finite left domain end (x/(1 + x^n) at 0).
    let left_end = map.domain().lo;
    for (k, s) in schwarz.iter().enumerate() {
        if xs[k] == x0 || (xs[k] == left_end && *s <= 0.0) {
            continue;
        }
        if !(*s < 0.0) {
            return Ok(MapClass::neither(Violation::SchwarzianNotNegative, Some(xs[k])));
        }
    }
    for k in 1..n - 1 {
        if xs[k - 1] <= x0 && x0 <= xs[k + 1] {
            continue;
        }
        let (sp, sh, sn) = (schwarz[k - 1], schwarz[k], schwarz[k + 1]);
        if sh >= sp && sh >= sn {
            let (x, v) = maximize(|x| map.slope_profile(x).1, xs[k - 1], xs[k + 1], REFINE_ITERATIONS);
            if !(v < 0.0) {
                return Ok(MapClass::neither(Violation::SchwarzianNotNegative, Some(x)));
            }
        }
    }

    // Unique fixed point K > x0; a fixed point sitting exactly on the left end
    // of the probe (0 for Ricker and logistic maps) is not counted.
    let g: alloc::vec::Vec<f64> = xs.iter().map(|&x| map.apply(x) - x).collect();
    let mut crossings = alloc::vec::Vec::new();
    for k in 0..n - 1 {
        if k > 0 && g[k] == 0.0 {
            crossings.push((xs[k], xs[k]));
        } else if g[k] != 0.0 && g[k + 1] != 0.0 && (g[k] > 0.0) != (g[k + 1] > 0.0) {
            crossings.push((xs[k], xs[k + 1]));
        }
    }
    if g[n - 1] == 0.0 {
        crossings.push((xs[n - 1], xs[n - 1]));
    }
    if crossings.len() != 1 {
        let witness = crossings.get(1).map(|c| c.0);
        return Ok(MapClass::neither(Violation::FixedPoint, witness));
    }
    let (a, b) = crossings[0];
    let k = if a == b { a } else { bisect(|x| map.apply(x) - x, a, b, 1e-14)? };
    if !(k > x0) {
        return Ok(MapClass::neither(Violation::FixedPoint, Some(k)));
    }
    Ok(MapClass {
        kind: MapKind::SUMap,
        critical_point: Some(x0),
        fixed_point: Some(k),
        finite_limit: None,
        witness: None,
        violation: None,
    })
}

/// The interval `[f(c), c]` for a finite left limit `c`, `[d, f(d)]` for a
/// finite right limit `d`, intersected when both exist. Decreasing maps only.
pub fn limit_interval<M: Feedback + ?Sized>(map: &M) -> Option<Interval> {
    let domain = map.domain();
    let from_left = map
        .left_limit()
        .filter(|c| c.is_finite() && domain.contains(*c))
        .map(|c| Interval::new(map.apply(c), c));
    let from_right = map
        .right_limit()
        .filter(|d| d.is_finite() && domain.contains(*d))
        .map(|d| Interval::new(d, map.apply(d)));
    match (from_left, from_right) {
        (Some(l), Some(r)) => l.intersect(&r).or(Some(l)),
        (l, r) => l.or(r),
    }
}

/// A compact invariant and attracting interval `[A, B]`.
///
/// S-maps use the finite limits of `f`; SU-maps use `[f^2(x0), f(x0)]`, which
/// requires `f^2(x0) >= x0`.
pub fn invariant_attracting_interval<M: Feedback + ?Sized>(map: &M, class: &MapClass) -> Result<Interval> {
    match class.kind {
        MapKind::Neither => Err(Error::Classification("map is neither an S-map nor an SU-map")),
        MapKind::SMap => limit_interval(map).ok_or(Error::NotApplicable("S-map without a finite limit in its domain")),
        MapKind::SUMap => {
            let x0 = class.critical_point.ok_or(Error::Classification("SU-map without critical point"))?;
            let top = map.eval(x0)?;
            let bottom = map.eval(top)?;
            if bottom < x0 {
                return Err(Error::NotApplicable("f^2(x0) < x0"));
            }
            Ok(Interval::new(bottom, top))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub grid_size: usize,
    /// Inflation of the invariant interval when building the probe window.
    pub margin: f64,
    /// Explicit probe window; overrides the automatic choice.
    pub window: Option<Interval>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { grid_size: 512, margin: 1.0, window: None }
    }
}

/// Fixed point, slope, classification and invariant interval of a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapAnalysis {
    pub class: MapClass,
    pub window: Interval,
    pub interval: Option<Interval>,
    pub fixed_point: Option<FixedPoint>,
}

impl MapAnalysis {
    pub fn is_s_map(&self) -> bool {
        self.class.kind == MapKind::SMap
    }
}

/// Chooses a probe window, classifies the map and locates its fixed point.
///
/// Decreasing maps are probed on `[A - margin, B + margin]` clipped to the
/// domain. A clipped finite domain end is pulled halfway towards the
/// invariant interval, since Hill-type maps have `f' = 0` exactly at `x = 0`
/// and the attractor never reaches that point.
pub fn analyze<M: Feedback + ?Sized>(map: &M, opts: &AnalysisOptions) -> Result<MapAnalysis> {
    let domain = map.domain();
    let window = match (opts.window, map.critical_point()) {
        (Some(w), _) => w,
        (None, Some(x0)) => {
            let peak = map.eval(x0)?;
            let lo = if domain.lo.is_finite() { domain.lo } else { x0 - opts.margin };
            let hi = (peak.max(x0) + opts.margin).min(domain.hi);
            Interval::new(lo, hi)
        }
        (None, None) => {
            let iv = limit_interval(map)
                .ok_or(Error::InvalidParameter("no finite limit: an explicit probe window is required"))?;
            let mut lo = iv.lo - opts.margin;
            let mut hi = iv.hi + opts.margin;
            if lo <= domain.lo {
                lo = 0.5 * (domain.lo + iv.lo);
            }
            if hi >= domain.hi {
                hi = 0.5 * (domain.hi + iv.hi);
            }
            Interval::new(lo, hi)
        }
    };
    let class = classify(map, window, opts.grid_size)?;
    let (interval, fixed_point) = match class.kind {
        MapKind::SMap => {
            let iv = invariant_attracting_interval(map, &class)?;
            let fp = if iv.width() == 0.0 {
                let k = iv.lo;
                FixedPoint { k, derivative_at_k: map.bundle(k).f1, residual: (map.apply(k) - k).abs() }
            } else {
                find_fixed_point(map, iv)?
            };
            (Some(iv), Some(fp))
        }
        MapKind::SUMap => {
            let iv = invariant_attracting_interval(map, &class).ok();
            let k = class.fixed_point.unwrap_or(f64::NAN);
            let x0 = class.critical_point.unwrap_or(f64::NAN);
            let fp = find_fixed_point(map, Interval::new(x0, window.hi)).ok().or_else(|| {
                Some(FixedPoint { k, derivative_at_k: map.bundle(k).f1, residual: (map.apply(k) - k).abs() })
            });
            (iv, fp)
        }
        MapKind::Neither => (None, None),
    };
    Ok(MapAnalysis { class, window, interval, fixed_point })
}
