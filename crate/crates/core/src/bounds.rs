//! Interval bounds for the global attractor of `x' = -a x + f(x(t - tau))`.
//!
//! Pipelines:
//!
//! * Wright type (`a = 0`, S-map with `f(0) = 0`): the dichotomy at
//!   `|f'(0)| = 3/2` and the nested intervals `[f^{2k+1}(c), f^{2k}(c)]`.
//! * The F-map refinement for `x' = -r (e^{x(t-1)} - 1)` in `y = e^x - 1`.
//! * The delay-independent 2-cycle bound `[alpha, beta]` for `a = 1`.
//! * The delay-dependent map `g = (1 - e^{-tau}) f + e^{-tau} K`.
//! * The `h` refinement of the upper end `g(0)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::classify::{analyze, limit_interval, AnalysisOptions, MapAnalysis, MapKind};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::maps::{DerivativeBundle, DerivativeMethod, Family, Feedback, MapSpec};
use crate::onedim::{find_two_cycle, two_cycle_in, FixedPoint, UNIT_SLOPE_SLACK};
use crate::roots::bisect;

/// Stability threshold on `|f'(0)|` for the Wright-type dichotomy.
pub const WRIGHT_THRESHOLD: f64 = 1.5;
/// Default number of `f^2` refinements in [`wright_basic_bounds`].
pub const DEFAULT_REFINEMENTS: usize = 3;
const INVERSE_TOL: f64 = 1e-12;
const H_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    GlobalStability,
    BoundedByInterval,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::GlobalStability => "global_stability",
            Verdict::BoundedByInterval => "bounded_by_interval",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    WrightBasic,
    WrightF,
    FCycle,
    GMap,
    HMap,
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::WrightBasic => "wright_basic",
            Pipeline::WrightF => "wright_f",
            Pipeline::FCycle => "f_cycle",
            Pipeline::GMap => "g_map",
            Pipeline::HMap => "h_map",
        }
    }
}

/// `X` is the state of the delay equation; `Y` is `e^x - 1` for Wright's equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinates {
    X,
    Y,
}

/// Output of one bound pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub pipeline: Pipeline,
    pub verdict: Verdict,
    pub coordinates: Coordinates,
    /// The equilibrium the bounds enclose.
    pub fixed_point: f64,
    /// The quantity compared against `threshold`.
    pub stability_margin: f64,
    pub threshold: f64,
    /// Computable lower end, e.g. `f^{2k+1}(c)` or `g^2(0)`.
    pub lower: Option<f64>,
    /// Computable upper end, e.g. `f^{2k}(c)`, `g(0)` or `h(0)`.
    pub upper: Option<f64>,
    /// The 2-cycle of the pipeline's map, which sits inside `[lower, upper]`.
    pub cycle: Option<Interval>,
    pub provenance: Vec<String>,
}

impl BoundsReport {
    fn stable(pipeline: Pipeline, coordinates: Coordinates, k: f64, margin: f64, threshold: f64, note: String) -> Self {
        BoundsReport {
            pipeline,
            verdict: Verdict::GlobalStability,
            coordinates,
            fixed_point: k,
            stability_margin: margin,
            threshold,
            lower: None,
            upper: None,
            cycle: None,
            provenance: alloc::vec![note],
        }
    }

    /// `[lower, upper]` when both ends are known.
    pub fn interval(&self) -> Option<Interval> {
        match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => Some(Interval { lo, hi }),
            _ => None,
        }
    }

    /// The coarse interval intersected with the 2-cycle, end by end.
    pub fn tightest(&self) -> (Option<f64>, Option<f64>) {
        let pick = |a: Option<f64>, b: Option<f64>, hi: bool| match (a, b) {
            (Some(x), Some(y)) => Some(if hi { x.min(y) } else { x.max(y) }),
            (x, y) => x.or(y),
        };
        (
            pick(self.lower, self.cycle.map(|c| c.lo), false),
            pick(self.upper, self.cycle.map(|c| c.hi), true),
        )
    }

    /// Maps every endpoint of an x-coordinate Wright report through `y = e^x - 1`.
    pub fn to_wright_y(&self) -> BoundsReport {
        if self.coordinates == Coordinates::Y {
            return self.clone();
        }
        let y = |x: f64| libm::expm1(x);
        let mut out = self.clone();
        out.coordinates = Coordinates::Y;
        out.fixed_point = y(self.fixed_point);
        out.lower = self.lower.map(y);
        out.upper = self.upper.map(y);
        out.cycle = self.cycle.map(|c| Interval { lo: y(c.lo), hi: y(c.hi) });
        out.provenance.push(String::from("endpoints mapped through y = e^x - 1"));
        out
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or(String::from("-"), |x| format!("{x:.10}"));
        write!(
            f,
            "{} {} margin={:.10} threshold={} lower={} upper={}",
            self.pipeline.name(),
            self.verdict.name(),
            self.stability_margin,
            self.threshold,
            opt(self.lower),
            opt(self.upper)
        )?;
        if let Some(c) = self.cycle {
            write!(f, " cycle=[{:.10}, {:.10}]", c.lo, c.hi)?;
        }
        Ok(())
    }
}

fn s_map_analysis<M: Feedback + ?Sized>(map: &M) -> Result<(MapAnalysis, FixedPoint)> {
    let analysis = analyze(map, &AnalysisOptions::default())?;
    if analysis.class.kind != MapKind::SMap {
        return Err(Error::Classification("bounds require an S-map"));
    }
    let fp = analysis.fixed_point.ok_or(Error::Classification("S-map without fixed point"))?;
    Ok((analysis, fp))
}

/// Wright-type bounds for any S-map with `f(0) = 0` and `a = 0`.
///
/// Starting from the finite limit `c`, the pair `f^{2k}(c), f^{2k+1}(c)`
/// brackets the attractor for every `k`.
pub fn wright_type_bounds<M: Feedback + ?Sized>(map: &M, k: usize) -> Result<BoundsReport> {
    let (analysis, fp) = s_map_analysis(map)?;
    if fp.k.abs() > 1e-9 || map.apply(0.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("Wright-type bounds require f(0) = 0"));
    }
    let margin = fp.derivative_at_k.abs();
    if margin <= WRIGHT_THRESHOLD {
        return Ok(BoundsReport::stable(
            Pipeline::WrightBasic,
            Coordinates::X,
            0.0,
            margin,
            WRIGHT_THRESHOLD,
            format!("|f'(0)| = {margin} <= 3/2: every solution tends to 0"),
        ));
    }
    let c = analysis.class.finite_limit.ok_or(Error::Classification("S-map without a finite limit"))?;
    let mut even = c;
    for _ in 0..k {
        even = map.apply(map.apply(even));
    }
    let odd = map.apply(even);
    let iv = Interval::new(even, odd);
    let cycle = find_two_cycle(map, &analysis.class)?;
    Ok(BoundsReport {
        pipeline: Pipeline::WrightBasic,
        verdict: Verdict::BoundedByInterval,
        coordinates: Coordinates::X,
        fixed_point: 0.0,
        stability_margin: margin,
        threshold: WRIGHT_THRESHOLD,
        lower: Some(iv.lo),
        upper: Some(iv.hi),
        cycle: cycle.map(|c| c.as_interval()),
        provenance: alloc::vec![
            format!("|f'(0)| = {margin} > 3/2: oscillatory solutions bounded by iterates of the limit {c}"),
            format!("bounds are f^{}(c) and f^{}(c)", 2 * k, 2 * k + 1),
            String::from("cycle: the 2-cycle of f, limit of the nested iterates"),
        ],
    })
}

/// Wright-type bounds for `f(x) = -r (e^x - 1)`, in x-coordinates.
pub fn wright_basic_bounds(r: f64, k: usize) -> Result<BoundsReport> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter("wright_basic_bounds requires r > 0"));
    }
    wright_type_bounds(&MapSpec::wright(r)?, k)
}

/// `phi(u) = (e^u - 1 - u)/u` and its first three derivatives.
fn phi_derivatives(u: f64) -> [f64; 4] {
    if u.abs() < 1.0 {
        // phi^(k)(u) = sum_{j>=k} j!/(j-k)! u^(j-k) / (j+1)!
        let mut out = [0.0; 4];
        let mut coef = 0.5; // 1/(j+1)! at j = 1
        let mut pows = [1.0; 32];
        for i in 1..pows.len() {
            pows[i] = pows[i - 1] * u;
        }
        for j in 1..30usize {
            let jf = j as f64;
            out[0] += coef * pows[j];
            out[1] += coef * jf * pows[j - 1];
            if j >= 2 {
                out[2] += coef * jf * (jf - 1.0) * pows[j - 2];
            }
            if j >= 3 {
                out[3] += coef * jf * (jf - 1.0) * (jf - 2.0) * pows[j - 3];
            }
            coef /= jf + 2.0;
        }
        return out;
    }
    let e = libm::exp(u);
    let em1 = libm::expm1(u);
    let u2 = u * u;
    [
        (em1 - u) / u,
        (u * e - em1) / u2,
        (e * (u2 - 2.0 * u + 2.0) - 2.0) / (u2 * u),
        (e * (u2 * u - 3.0 * u2 + 6.0 * u - 6.0) + 6.0) / (u2 * u2),
    ]
}

/// `F(y) = -1 + exp[(r y + 1 - e^{r y})/y]`, with `F(0) = 0`.
///
/// Written as `F = e^Q - 1` with `Q(y) = -r phi(r y)`. `F'` underflows for
/// moderate positive `y`, so [`Feedback::slope_profile`] reports `Q'` and
/// `SF = SQ - Q'^2/2` instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrightFMap {
    pub r: f64,
}

impl WrightFMap {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::InvalidParameter("the F-map requires r > 1"));
        }
        Ok(WrightFMap { r })
    }

    /// `[Q, Q', Q'', Q''']` at `y`.
    fn q(&self, y: f64) -> [f64; 4] {
        let r = self.r;
        let p = phi_derivatives(r * y);
        [-r * p[0], -r * r * p[1], -r * r * r * p[2], -r * r * r * r * p[3]]
    }
}

impl Feedback for WrightFMap {
    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }

    fn apply(&self, y: f64) -> f64 {
        libm::expm1(-self.r * phi_derivatives(self.r * y)[0])
    }

    fn bundle(&self, y: f64) -> DerivativeBundle {
        let [q0, q1, q2, q3] = self.q(y);
        let g = libm::exp(q0);
        DerivativeBundle {
            f0: libm::expm1(q0),
            f1: g * q1,
            f2: g * (q2 + q1 * q1),
            f3: g * (q3 + 3.0 * q1 * q2 + q1 * q1 * q1),
            method: DerivativeMethod::ClosedForm,
        }
    }

    fn left_limit(&self) -> Option<f64> {
        Some(libm::expm1(self.r))
    }

    fn right_limit(&self) -> Option<f64> {
        Some(-1.0)
    }

    fn slope_profile(&self, y: f64) -> (f64, f64) {
        let [_, q1, q2, q3] = self.q(y);
        let ratio = q2 / q1;
        (q1, q3 / q1 - 1.5 * ratio * ratio - 0.5 * q1 * q1)
    }
}

/// Bounds for Wright's equation in `y = e^x - 1` from the F-map:
/// `[F^2(-1), F(-1)]` and the 2-cycle of `F`.
#[allow(non_snake_case)]
pub fn wright_F_bounds(r: f64) -> Result<BoundsReport> {
    let fmap = WrightFMap::new(r)?;
    if r <= WRIGHT_THRESHOLD {
        return Ok(BoundsReport::stable(
            Pipeline::WrightF,
            Coordinates::Y,
            0.0,
            r,
            WRIGHT_THRESHOLD,
            format!("r = {r} <= 3/2: global stability from the basic dichotomy, not from F"),
        ));
    }
    let (analysis, _) = s_map_analysis(&fmap)?;
    let upper = fmap.apply(-1.0);
    let lower = fmap.apply(upper);
    let cycle = find_two_cycle(&fmap, &analysis.class)?;
    Ok(BoundsReport {
        pipeline: Pipeline::WrightF,
        verdict: Verdict::BoundedByInterval,
        coordinates: Coordinates::Y,
        fixed_point: 0.0,
        stability_margin: r,
        threshold: WRIGHT_THRESHOLD,
        lower: Some(lower),
        upper: Some(upper),
        cycle: cycle.map(|c| c.as_interval()),
        provenance: alloc::vec![
            format!("upper: F(-1) = -1 + exp(r - 1 + e^-r) = {upper}"),
            format!("lower: F(F(-1)) = {lower}"),
            format!("F'(0) = -r^2/2 = {}: cycle is the 2-cycle of F", -r * r / 2.0),
        ],
    })
}

/// The delay-independent bound `[alpha, beta]` for `a = 1`.
pub fn f_cycle_bounds<M: Feedback + ?Sized>(map: &M) -> Result<BoundsReport> {
    let (analysis, fp) = s_map_analysis(map)?;
    let margin = fp.derivative_at_k.abs();
    if margin <= 1.0 + UNIT_SLOPE_SLACK {
        return Ok(BoundsReport::stable(
            Pipeline::FCycle,
            Coordinates::X,
            fp.k,
            margin,
            1.0,
            format!("|f'(K)| = {margin} <= 1: K = {} attracts for every delay", fp.k),
        ));
    }
    let cycle = find_two_cycle(map, &analysis.class)?.ok_or(Error::NotDecidable)?;
    let iv = cycle.as_interval();
    Ok(BoundsReport {
        pipeline: Pipeline::FCycle,
        verdict: Verdict::BoundedByInterval,
        coordinates: Coordinates::X,
        fixed_point: fp.k,
        stability_margin: margin,
        threshold: 1.0,
        lower: Some(iv.lo),
        upper: Some(iv.hi),
        cycle: Some(iv),
        provenance: alloc::vec![format!(
            "|f'(K)| = {margin} > 1: the 2-cycle {{{}, {}}} of f bounds the attractor for every delay",
            cycle.alpha, cycle.beta
        )],
    })
}

/// `g(x) = (1 - e^{-tau}) f(x) + e^{-tau} K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GMap<M> {
    pub base: M,
    pub tau: f64,
    pub k: f64,
}

impl<M: Feedback> GMap<M> {
    pub fn new(base: M, tau: f64, k: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter("tau must be positive"));
        }
        Ok(GMap { base, tau, k })
    }

    pub fn scale(&self) -> f64 {
        -libm::expm1(-self.tau)
    }

    pub fn shift(&self) -> f64 {
        libm::exp(-self.tau) * self.k
    }
}

impl<M: Feedback> Feedback for GMap<M> {
    fn domain(&self) -> Interval {
        self.base.domain()
    }

    fn apply(&self, x: f64) -> f64 {
        self.scale() * self.base.apply(x) + self.shift()
    }

    fn bundle(&self, x: f64) -> DerivativeBundle {
        let b = self.base.bundle(x);
        let c = self.scale();
        DerivativeBundle { f0: c * b.f0 + self.shift(), f1: c * b.f1, f2: c * b.f2, f3: c * b.f3, method: b.method }
    }

    fn left_limit(&self) -> Option<f64> {
        self.base.left_limit().map(|v| self.scale() * v + self.shift())
    }

    fn right_limit(&self) -> Option<f64> {
        self.base.right_limit().map(|v| self.scale() * v + self.shift())
    }

    fn slope_profile(&self, x: f64) -> (f64, f64) {
        let (s, sf) = self.base.slope_profile(x);
        (self.scale() * s, sf)
    }
}

/// The delay-dependent bound: global stability when
/// `(1 - e^{-tau}) |f'(K)| <= 1`, otherwise `[g^2(c), g(c)]` from the finite
/// limit `c` (`c = 0` on `[0, inf)`) and the 2-cycle of `g`.
pub fn g_map_bounds<M: Feedback + ?Sized>(map: &M, tau: f64) -> Result<BoundsReport> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter("tau must be positive"));
    }
    let (_, fp) = s_map_analysis(map)?;
    let g = GMap::new(map, tau, fp.k)?;
    let margin = g.scale() * fp.derivative_at_k.abs();
    if margin <= 1.0 + UNIT_SLOPE_SLACK {
        return Ok(BoundsReport::stable(
            Pipeline::GMap,
            Coordinates::X,
            fp.k,
            margin,
            1.0,
            format!("(1 - e^-tau)|f'(K)| = {margin} <= 1: K = {} attracts", fp.k),
        ));
    }
    let (lower, upper, note) = if let Some(top) = g.left_limit() {
        (g.apply(top), top, "g(c) and g^2(c) with c the left end of the domain")
    } else if let Some(bottom) = g.right_limit() {
        (bottom, g.apply(bottom), "g(d) and d with d the right limit of g")
    } else {
        return Err(Error::Classification("S-map without a finite limit"));
    };
    let iv_g = limit_interval(&g).ok_or(Error::Classification("g has no invariant interval"))?;
    let fp_g = FixedPoint { k: fp.k, derivative_at_k: g.scale() * fp.derivative_at_k, residual: (g.apply(fp.k) - fp.k).abs() };
    let cycle = two_cycle_in(&g, iv_g, &fp_g)?;
    Ok(BoundsReport {
        pipeline: Pipeline::GMap,
        verdict: Verdict::BoundedByInterval,
        coordinates: Coordinates::X,
        fixed_point: fp.k,
        stability_margin: margin,
        threshold: 1.0,
        lower: Some(lower),
        upper: Some(upper),
        cycle: Some(cycle.as_interval()),
        provenance: alloc::vec![
            format!("(1 - e^-tau)|f'(K)| = {margin} > 1 at tau = {tau}"),
            format!("coarse: {note}"),
            String::from("cycle: the 2-cycle of g"),
        ],
    })
}

/// `f^{-1}(y)` on the monotone branch by bisection.
fn inverse<M: Feedback + ?Sized>(map: &M, y: f64, bracket: Interval) -> Result<f64> {
    let g = |x: f64| map.apply(x) - y;
    let (a, b) = (g(bracket.lo), g(bracket.hi));
    if a == 0.0 {
        return Ok(bracket.lo);
    }
    if b == 0.0 {
        return Ok(bracket.hi);
    }
    if !(a > 0.0 && b < 0.0) {
        return Err(Error::Inversion { y });
    }
    bisect(g, bracket.lo, bracket.hi, INVERSE_TOL)
}

/// `F_h(x) = x - e^{-tau} f^{-1}(x)`, whose inverse defines `h`.
pub fn h_operator<M: Feedback + ?Sized>(map: &M, tau: f64, x: f64) -> Result<f64> {
    let (analysis, _) = s_map_analysis(map)?;
    h_operator_in(map, tau, x, inverse_bracket(map, &analysis))
}

fn inverse_bracket<M: Feedback + ?Sized>(map: &M, analysis: &MapAnalysis) -> Interval {
    let domain = map.domain();
    let iv = analysis.interval.unwrap_or(analysis.window);
    Interval::new((iv.lo - 1.0).max(domain.lo), (iv.hi + 1.0).min(domain.hi))
}

fn h_operator_in<M: Feedback + ?Sized>(map: &M, tau: f64, x: f64, bracket: Interval) -> Result<f64> {
    Ok(x - libm::exp(-tau) * inverse(map, x, bracket)?)
}

/// `h(c)` for the left domain end `c`: the root of
/// `F_h(x) = (1 - e^{-tau}) f(c)` in `[K, g(c)]`. Never exceeds `g(c)`.
pub fn h_map_bound<M: Feedback + ?Sized>(map: &M, tau: f64) -> Result<f64> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter("tau must be positive"));
    }
    let (analysis, fp) = s_map_analysis(map)?;
    let anchor = map.domain().lo;
    if !anchor.is_finite() {
        return Err(Error::NotApplicable("the h-map needs a finite left end of the domain"));
    }
    let g = GMap::new(map, tau, fp.k)?;
    let bracket = inverse_bracket(map, &analysis);
    let target = g.scale() * map.apply(anchor);
    let top = g.apply(anchor);
    // F_h(K) - target < 0 < F_h(g(c)) - target for a decreasing f.
    let err = core::cell::Cell::new(None);
    let phi = |x: f64| match h_operator_in(map, tau, x, bracket) {
        Ok(v) => v - target,
        Err(e) => {
            err.set(Some(e));
            f64::NAN
        }
    };
    let root = bisect(phi, fp.k, top, H_TOL);
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(root?.min(top))
}

/// The intersection of every applicable pipeline, with the source of each end.
#[derive(Debug, Clone, PartialEq)]
pub struct BestBounds {
    pub verdict: Verdict,
    pub coordinates: Coordinates,
    pub fixed_point: f64,
    pub lower: Option<(f64, Pipeline)>,
    pub upper: Option<(f64, Pipeline)>,
    pub reports: Vec<BoundsReport>,
    pub provenance: Vec<String>,
}

impl BestBounds {
    pub fn interval(&self) -> Option<Interval> {
        match (self.lower, self.upper) {
            (Some((lo, _)), Some((hi, _))) => Some(Interval { lo, hi }),
            _ => None,
        }
    }

    /// Intersects `reports`; global stability from any one report wins.
    pub fn combine(coordinates: Coordinates, fixed_point: f64, reports: Vec<BoundsReport>, mut provenance: Vec<String>) -> Self {
        let stable = reports.iter().find(|r| r.verdict == Verdict::GlobalStability);
        if let Some(s) = stable {
            provenance.push(format!("global stability certified by {}", s.pipeline.name()));
            return BestBounds {
                verdict: Verdict::GlobalStability,
                coordinates,
                fixed_point,
                lower: None,
                upper: None,
                reports,
                provenance,
            };
        }
        let mut lower: Option<(f64, Pipeline)> = None;
        let mut upper: Option<(f64, Pipeline)> = None;
        for r in &reports {
            let (lo, hi) = r.tightest();
            if let Some(lo) = lo {
                if lower.is_none_or(|(v, _)| lo > v) {
                    lower = Some((lo, r.pipeline));
                }
            }
            if let Some(hi) = hi {
                if upper.is_none_or(|(v, _)| hi < v) {
                    upper = Some((hi, r.pipeline));
                }
            }
        }
        if let Some((v, p)) = lower {
            provenance.push(format!("lower {v} from {}", p.name()));
        }
        if let Some((v, p)) = upper {
            provenance.push(format!("upper {v} from {}", p.name()));
        }
        BestBounds { verdict: Verdict::BoundedByInterval, coordinates, fixed_point, lower, upper, reports, provenance }
    }
}

/// Runs the pipelines that apply to `x' = -a x + f(x(t - tau))`.
///
/// `a = 0`: the delay is scaled out (`f -> tau f`); Wright's family is
/// reported in `y = e^x - 1` and also uses the F-map. `a = 1`: the f-cycle,
/// g-map and h-map pipelines. Other values of `a` are rejected.
pub fn best_bounds(map: &MapSpec, a: f64, tau: f64) -> Result<BestBounds> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter("tau must be positive"));
    }
    if a == 0.0 {
        if let Family::WrightExp { r } = map.family {
            let r_eff = r * tau;
            let basic = wright_basic_bounds(r_eff, DEFAULT_REFINEMENTS)?.to_wright_y();
            let mut reports = alloc::vec![basic];
            let mut notes = alloc::vec![format!("a = 0: delay scaled out, effective r = {r_eff}")];
            if r_eff > 1.0 {
                reports.push(wright_F_bounds(r_eff)?);
            } else {
                notes.push(String::from("F-map skipped: requires r > 1"));
            }
            return Ok(BestBounds::combine(Coordinates::Y, 0.0, reports, notes));
        }
        let scaled = crate::maps::Affine::new(*map, tau, 0.0)?;
        let report = wright_type_bounds(&scaled, DEFAULT_REFINEMENTS)?;
        let notes = alloc::vec![format!("a = 0: delay scaled out, feedback multiplied by {tau}")];
        return Ok(BestBounds::combine(Coordinates::X, 0.0, alloc::vec![report], notes));
    }
    if a != 1.0 {
        return Err(Error::InvalidParameter("best_bounds supports a = 0 and a = 1 only"));
    }
    let f_report = f_cycle_bounds(map)?;
    let k = f_report.fixed_point;
    let g_report = g_map_bounds(map, tau)?;
    let mut notes = Vec::new();
    let mut reports = alloc::vec![f_report, g_report];
    if reports.iter().all(|r| r.verdict == Verdict::BoundedByInterval) {
        match h_map_bound(map, tau) {
            Ok(h0) => reports.push(BoundsReport {
                pipeline: Pipeline::HMap,
                verdict: Verdict::BoundedByInterval,
                coordinates: Coordinates::X,
                fixed_point: k,
                stability_margin: reports[1].stability_margin,
                threshold: 1.0,
                lower: None,
                upper: Some(h0),
                cycle: None,
                provenance: alloc::vec![format!("h(0) = {h0}: root of x - e^-tau f^-1(x) = (1 - e^-tau) f(0)")],
            }),
            Err(Error::NotApplicable(why)) => notes.push(format!("h-map skipped: {why}")),
            Err(e) => return Err(e),
        }
    }
    Ok(BestBounds::combine(Coordinates::X, k, reports, notes))
}
