//! Feedback nonlinearities `f` with exact derivatives up to third order.
//!
//! Every built-in family carries a closed-form derivative suite so that the
//! Schwarzian derivative
//!
//! ```text
//! (Sf)(x) = f'''(x)/f'(x) - 3/2 (f''(x)/f'(x))^2
//! ```
//!
//! can be evaluated without differencing. Maps known only through an
//! evaluation callback go through [`FnMap`], which differentiates numerically.

use core::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::interval::Interval;

/// `|f'(x)|` below this is treated as a critical point by [`Feedback::schwarzian`].
pub const DERIVATIVE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMethod {
    ClosedForm,
    FiniteDifference,
}

/// `f, f', f'', f'''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBundle {
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub method: DerivativeMethod,
}

impl DerivativeBundle {
    /// Schwarzian from the stored derivatives, with no floor on `f'`.
    pub fn schwarzian(&self) -> f64 {
        let ratio = self.f2 / self.f1;
        self.f3 / self.f1 - 1.5 * ratio * ratio
    }

    pub fn is_finite(&self) -> bool {
        self.f0.is_finite() && self.f1.is_finite() && self.f2.is_finite() && self.f3.is_finite()
    }
}

/// A scalar feedback map on an interval domain.
pub trait Feedback {
    fn domain(&self) -> Interval;

    /// Raw evaluation with no domain check. Hot loops call this.
    fn apply(&self, x: f64) -> f64;

    /// Raw derivative bundle with no domain check.
    fn bundle(&self, x: f64) -> DerivativeBundle;

    /// `f(lo)` for a finite left end of the domain, otherwise the limit `f(-inf)` when finite.
    fn left_limit(&self) -> Option<f64> {
        let lo = self.domain().lo;
        lo.is_finite().then(|| self.apply(lo))
    }

    /// `f(hi)` for a finite right end of the domain, otherwise the limit `f(+inf)` when finite.
    fn right_limit(&self) -> Option<f64> {
        let hi = self.domain().hi;
        hi.is_finite().then(|| self.apply(hi))
    }

    /// Analytically known interior critical point (unimodal families).
    fn critical_point(&self) -> Option<f64> {
        None
    }

    /// A positive multiple of `f'(x)` together with `(Sf)(x)`. Classification
    /// only needs signs, so maps whose derivative underflows far from the
    /// origin override this with a rescaled slope.
    fn slope_profile(&self, x: f64) -> (f64, f64) {
        let b = self.bundle(x);
        (b.f1, b.schwarzian())
    }

    fn eval(&self, x: f64) -> Result<f64> {
        if !self.domain().contains(x) {
            return Err(Error::Domain { x });
        }
        let y = self.apply(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Domain { x })
        }
    }

    fn derivatives(&self, x: f64) -> Result<DerivativeBundle> {
        if !self.domain().contains(x) {
            return Err(Error::Domain { x });
        }
        Ok(self.bundle(x))
    }

    fn schwarzian(&self, x: f64) -> Result<f64> {
        let b = self.derivatives(x)?;
        if !(b.f1.abs() >= DERIVATIVE_FLOOR) {
            return Err(Error::CriticalPoint { x });
        }
        Ok(b.schwarzian())
    }
}

impl<M: Feedback + ?Sized> Feedback for &M {
    fn domain(&self) -> Interval {
        (**self).domain()
    }
    fn apply(&self, x: f64) -> f64 {
        (**self).apply(x)
    }
    fn bundle(&self, x: f64) -> DerivativeBundle {
        (**self).bundle(x)
    }
    fn left_limit(&self) -> Option<f64> {
        (**self).left_limit()
    }
    fn right_limit(&self) -> Option<f64> {
        (**self).right_limit()
    }
    fn critical_point(&self) -> Option<f64> {
        (**self).critical_point()
    }
    fn slope_profile(&self, x: f64) -> (f64, f64) {
        (**self).slope_profile(x)
    }
}

/// The built-in feedback families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `-r (e^x - 1)`
    WrightExp { r: f64 },
    /// `p / (1 + x^n)`
    MackeyGlassHill { p: f64, n: f64 },
    /// `p e^{-a x}`
    LasotaWazewska { p: f64, a: f64 },
    /// `lambda x e^{-x}`
    Ricker { lambda: f64 },
    /// `lambda x (1 - x)`
    Logistic { lambda: f64 },
    /// `-a tanh(b x)`
    TanhOdd { a: f64, b: f64 },
    /// `-a atan(b x)`
    ArctanOdd { a: f64, b: f64 },
    /// `(b/a) x / (1 + x^n)`: the unimodal feedback of
    /// `x' = -a x + b x(t-1)/(1 + x(t-1)^n)` normalised to unit decay.
    TaylorMG { a: f64, b: f64, n: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::WrightExp { .. } => "wright_exp",
            Family::MackeyGlassHill { .. } => "mackey_glass_hill",
            Family::LasotaWazewska { .. } => "lasota_wazewska",
            Family::Ricker { .. } => "ricker",
            Family::Logistic { .. } => "logistic",
            Family::TanhOdd { .. } => "tanh_odd",
            Family::ArctanOdd { .. } => "arctan_odd",
            Family::TaylorMG { .. } => "taylor_mg",
        }
    }

    pub fn natural_domain(&self) -> Interval {
        match self {
            Family::WrightExp { .. } | Family::TanhOdd { .. } | Family::ArctanOdd { .. } => {
                Interval::REAL_LINE
            }
            Family::Logistic { .. } => Interval::new(0.0, 1.0),
            Family::MackeyGlassHill { .. }
            | Family::LasotaWazewska { .. }
            | Family::Ricker { .. }
            | Family::TaylorMG { .. } => Interval::NON_NEGATIVE,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |cond: bool, what: &'static str| if cond { Ok(()) } else { Err(Error::InvalidParameter(what)) };
        match *self {
            Family::WrightExp { r } => ok(r > 0.0, "wright_exp requires r > 0"),
            Family::MackeyGlassHill { p, n } => ok(p > 0.0 && n > 1.0, "mackey_glass_hill requires p > 0, n > 1"),
            Family::LasotaWazewska { p, a } => ok(p > 0.0 && a > 0.0, "lasota_wazewska requires p > 0, a > 0"),
            Family::Ricker { lambda } => ok(lambda > 1.0, "ricker requires lambda > 1"),
            Family::Logistic { lambda } => ok(lambda > 0.0 && lambda <= 4.0, "logistic requires 0 < lambda <= 4"),
            Family::TanhOdd { a, b } => ok(a > 0.0 && b > 0.0, "tanh_odd requires a > 0, b > 0"),
            Family::ArctanOdd { a, b } => ok(a > 0.0 && b > 0.0, "arctan_odd requires a > 0, b > 0"),
            Family::TaylorMG { a, b, n } => {
                ok(a > 0.0 && b > 0.0 && n > 1.0, "taylor_mg requires a > 0, b > 0, n > 1")
            }
        }
        .and_then(|()| {
            let finite = match *self {
                Family::WrightExp { r } => r.is_finite(),
                Family::MackeyGlassHill { p, n } => p.is_finite() && n.is_finite(),
                Family::LasotaWazewska { p, a } => p.is_finite() && a.is_finite(),
                Family::Ricker { lambda } | Family::Logistic { lambda } => lambda.is_finite(),
                Family::TanhOdd { a, b } | Family::ArctanOdd { a, b } => a.is_finite() && b.is_finite(),
                Family::TaylorMG { a, b, n } => a.is_finite() && b.is_finite() && n.is_finite(),
            };
            ok(finite, "parameters must be finite")
        })
    }

    fn limit_neg_inf(&self) -> Option<f64> {
        match *self {
            Family::WrightExp { r } => Some(r),
            Family::TanhOdd { a, .. } => Some(a),
            Family::ArctanOdd { a, .. } => Some(a * FRAC_PI_2),
            _ => None,
        }
    }

    fn limit_pos_inf(&self) -> Option<f64> {
        match *self {
            Family::WrightExp { .. } | Family::Logistic { .. } => None,
            Family::MackeyGlassHill { .. }
            | Family::LasotaWazewska { .. }
            | Family::Ricker { .. }
            | Family::TaylorMG { .. } => Some(0.0),
            Family::TanhOdd { a, .. } => Some(-a),
            Family::ArctanOdd { a, .. } => Some(-a * FRAC_PI_2),
        }
    }
}

/// A built-in family restricted to a domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSpec {
    pub family: Family,
    pub domain: Interval,
}

impl MapSpec {
    /// The family on its natural domain.
    pub fn new(family: Family) -> Result<Self> {
        family.validate()?;
        Ok(MapSpec { family, domain: family.natural_domain() })
    }

    /// The family restricted to `domain`, which must lie inside the natural domain.
    pub fn with_domain(family: Family, domain: Interval) -> Result<Self> {
        family.validate()?;
        if domain.lo.is_nan() || domain.hi.is_nan() || !family.natural_domain().contains_interval(&domain) {
            return Err(Error::InvalidParameter("domain must lie inside the family's natural domain"));
        }
        Ok(MapSpec { family, domain })
    }

    pub fn wright(r: f64) -> Result<Self> {
        Self::new(Family::WrightExp { r })
    }

    pub fn mackey_glass(p: f64, n: f64) -> Result<Self> {
        Self::new(Family::MackeyGlassHill { p, n })
    }

    pub fn lasota_wazewska(p: f64, a: f64) -> Result<Self> {
        Self::new(Family::LasotaWazewska { p, a })
    }

    pub fn ricker(lambda: f64) -> Result<Self> {
        Self::new(Family::Ricker { lambda })
    }

    pub fn logistic(lambda: f64) -> Result<Self> {
        Self::new(Family::Logistic { lambda })
    }

    pub fn tanh_odd(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::TanhOdd { a, b })
    }

    pub fn arctan_odd(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::ArctanOdd { a, b })
    }

    pub fn taylor(a: f64, b: f64, n: f64) -> Result<Self> {
        Self::new(Family::TaylorMG { a, b, n })
    }
}

/// `c x^e`, with the conventions `c = 0 => 0` and `0^e` handled explicitly.
fn mono(c: f64, x: f64, e: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else if x == 0.0 {
        if e > 0.0 {
            0.0
        } else if e == 0.0 {
            c
        } else {
            c * f64::INFINITY
        }
    } else {
        c * libm::pow(x, e)
    }
}

/// `w = 1/(1 + x^n)` and its first three derivatives.
fn hill(x: f64, n: f64) -> [f64; 4] {
    let u = libm::pow(x, n);
    let u1 = mono(n, x, n - 1.0);
    let u2 = mono(n * (n - 1.0), x, n - 2.0);
    let u3 = mono(n * (n - 1.0) * (n - 2.0), x, n - 3.0);
    let s = 1.0 / (1.0 + u);
    let p1 = -s * s;
    let p2 = 2.0 * s * s * s;
    let p3 = -6.0 * s * s * s * s;
    [s, p1 * u1, p2 * u1 * u1 + p1 * u2, p3 * u1 * u1 * u1 + 3.0 * p2 * u1 * u2 + p1 * u3]
}

impl Feedback for MapSpec {
    fn domain(&self) -> Interval {
        self.domain
    }

    fn apply(&self, x: f64) -> f64 {
        match self.family {
            Family::WrightExp { r } => -r * libm::expm1(x),
            Family::MackeyGlassHill { p, n } => p / (1.0 + libm::pow(x, n)),
            Family::LasotaWazewska { p, a } => p * libm::exp(-a * x),
            Family::Ricker { lambda } => lambda * x * libm::exp(-x),
            Family::Logistic { lambda } => lambda * x * (1.0 - x),
            Family::TanhOdd { a, b } => -a * libm::tanh(b * x),
            Family::ArctanOdd { a, b } => -a * libm::atan(b * x),
            Family::TaylorMG { a, b, n } => (b / a) * x / (1.0 + libm::pow(x, n)),
        }
    }

    fn bundle(&self, x: f64) -> DerivativeBundle {
        let [f0, f1, f2, f3] = match self.family {
            Family::WrightExp { r } => {
                let e = -r * libm::exp(x);
                [-r * libm::expm1(x), e, e, e]
            }
            Family::MackeyGlassHill { p, n } => hill(x, n).map(|w| p * w),
            Family::LasotaWazewska { p, a } => {
                let e = p * libm::exp(-a * x);
                [e, -a * e, a * a * e, -a * a * a * e]
            }
            Family::Ricker { lambda } => {
                let e = lambda * libm::exp(-x);
                [x * e, (1.0 - x) * e, (x - 2.0) * e, (3.0 - x) * e]
            }
            Family::Logistic { lambda } => {
                [lambda * x * (1.0 - x), lambda * (1.0 - 2.0 * x), -2.0 * lambda, 0.0]
            }
            Family::TanhOdd { a, b } => {
                let t = libm::tanh(b * x);
                let s = 1.0 - t * t;
                [
                    -a * t,
                    -a * b * s,
                    2.0 * a * b * b * t * s,
                    a * b * b * b * (2.0 * s * s - 4.0 * t * t * s),
                ]
            }
            Family::ArctanOdd { a, b } => {
                let bx = b * x;
                let w = 1.0 + bx * bx;
                [
                    -a * libm::atan(bx),
                    -a * b / w,
                    2.0 * a * b * b * bx / (w * w),
                    2.0 * a * b * b * b * (1.0 - 3.0 * bx * bx) / (w * w * w),
                ]
            }
            Family::TaylorMG { a, b, n } => {
                let c = b / a;
                let [w0, w1, w2, w3] = hill(x, n);
                [
                    c * x * w0,
                    c * (w0 + x * w1),
                    c * (2.0 * w1 + x * w2),
                    c * (3.0 * w2 + x * w3),
                ]
            }
        };
        DerivativeBundle { f0, f1, f2, f3, method: DerivativeMethod::ClosedForm }
    }

    fn slope_profile(&self, x: f64) -> (f64, f64) {
        match self.family {
            // p/(1+u) is Moebius in u = x^n, so Sf = S(x^n); stays finite
            // where f' underflows near 0
            Family::MackeyGlassHill { n, .. } if x > 0.0 => {
                (self.bundle(x).f1, (1.0 - n * n) / (2.0 * x * x))
            }
            _ => {
                let b = self.bundle(x);
                (b.f1, b.schwarzian())
            }
        }
    }

    fn left_limit(&self) -> Option<f64> {
        if self.domain.lo.is_finite() {
            Some(self.apply(self.domain.lo))
        } else {
            self.family.limit_neg_inf()
        }
    }

    fn right_limit(&self) -> Option<f64> {
        if self.domain.hi.is_finite() {
            Some(self.apply(self.domain.hi))
        } else {
            self.family.limit_pos_inf()
        }
    }

    fn critical_point(&self) -> Option<f64> {
        let x0 = match self.family {
            Family::Ricker { .. } => 1.0,
            Family::Logistic { .. } => 0.5,
            Family::TaylorMG { n, .. } => libm::pow(n - 1.0, -1.0 / n),
            _ => return None,
        };
        self.domain.contains(x0).then_some(x0)
    }
}

/// A map given only by an evaluation callback. Derivatives are central
/// differences; limits can be attached when known.
pub struct FnMap<F> {
    f: F,
    domain: Interval,
    left: Option<f64>,
    right: Option<f64>,
}

impl<F: Fn(f64) -> f64> FnMap<F> {
    pub fn new(f: F, domain: Interval) -> Self {
        FnMap { f, domain, left: None, right: None }
    }

    pub fn with_left_limit(mut self, c: f64) -> Self {
        self.left = Some(c);
        self
    }

    pub fn with_right_limit(mut self, c: f64) -> Self {
        self.right = Some(c);
        self
    }
}

impl<F: Fn(f64) -> f64> Feedback for FnMap<F> {
    fn domain(&self) -> Interval {
        self.domain
    }

    fn apply(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn bundle(&self, x: f64) -> DerivativeBundle {
        let f = &self.f;
        let s = x.abs().max(1.0);
        // Fourth-order stencils for f' and f''; the f''' stencil is second order
        // with a wider step to keep roundoff in check.
        let h = 1e-3 * s;
        let (fp1, fm1, fp2, fm2) = (f(x + h), f(x - h), f(x + 2.0 * h), f(x - 2.0 * h));
        let f0 = f(x);
        let f1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
        let f2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
        let k = 5e-3 * s;
        let f3 = (f(x + 2.0 * k) - 2.0 * f(x + k) + 2.0 * f(x - k) - f(x - 2.0 * k)) / (2.0 * k * k * k);
        DerivativeBundle { f0, f1, f2, f3, method: DerivativeMethod::FiniteDifference }
    }

    fn left_limit(&self) -> Option<f64> {
        self.left.or_else(|| self.domain.lo.is_finite().then(|| (self.f)(self.domain.lo)))
    }

    fn right_limit(&self) -> Option<f64> {
        self.right.or_else(|| self.domain.hi.is_finite().then(|| (self.f)(self.domain.hi)))
    }
}

/// Affine post-composition `x -> scale * f(x) + shift`. Leaves the
/// Schwarzian unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine<M> {
    pub inner: M,
    pub scale: f64,
    pub shift: f64,
}

impl<M: Feedback> Affine<M> {
    pub fn new(inner: M, scale: f64, shift: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidParameter("affine scale must be finite and nonzero"));
        }
        Ok(Affine { inner, scale, shift })
    }
}

impl<M: Feedback> Feedback for Affine<M> {
    fn domain(&self) -> Interval {
        self.inner.domain()
    }

    fn apply(&self, x: f64) -> f64 {
        self.scale * self.inner.apply(x) + self.shift
    }

    fn bundle(&self, x: f64) -> DerivativeBundle {
        let b = self.inner.bundle(x);
        DerivativeBundle {
            f0: self.scale * b.f0 + self.shift,
            f1: self.scale * b.f1,
            f2: self.scale * b.f2,
            f3: self.scale * b.f3,
            method: b.method,
        }
    }

    fn left_limit(&self) -> Option<f64> {
        self.inner.left_limit().map(|c| self.scale * c + self.shift)
    }

    fn right_limit(&self) -> Option<f64> {
        self.inner.right_limit().map(|c| self.scale * c + self.shift)
    }

    fn critical_point(&self) -> Option<f64> {
        self.inner.critical_point()
    }

    fn slope_profile(&self, x: f64) -> (f64, f64) {
        let (slope, schwarzian) = self.inner.slope_profile(x);
        (self.scale * slope, schwarzian)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let w = MapSpec::wright(2.0).unwrap();
        assert_eq!(w.eval(0.0).unwrap(), 0.0);
        let mg = MapSpec::mackey_glass(2.0, 20.0).unwrap();
        assert_eq!(mg.eval(1.0).unwrap(), 1.0);
        assert_eq!(mg.eval(0.0).unwrap(), 2.0);
    }

    #[test]
    fn eval_outside_domain() {
        let mg = MapSpec::mackey_glass(2.0, 20.0).unwrap();
        assert_eq!(mg.eval(-0.5), Err(Error::Domain { x: -0.5 }));
        assert!(mg.derivatives(-1.0).is_err());
    }

    #[test]
    fn derivative_examples() {
        let w = MapSpec::wright(2.0).unwrap();
        assert_eq!(w.derivatives(0.0).unwrap().f1, -2.0);
        let mg = MapSpec::mackey_glass(2.0, 20.0).unwrap();
        let b = mg.derivatives(1.0).unwrap();
        assert!((b.f1 + 10.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_validation() {
        assert!(MapSpec::wright(0.0).is_err());
        assert!(MapSpec::mackey_glass(2.0, 1.0).is_err());
        assert!(MapSpec::logistic(4.5).is_err());
        assert!(MapSpec::with_domain(Family::MackeyGlassHill { p: 2.0, n: 20.0 }, Interval::new(-1.0, 2.0)).is_err());
        assert!(MapSpec::with_domain(Family::WrightExp { r: 2.0 }, Interval::new(-3.0, 3.0)).is_ok());
    }

    #[test]
    fn schwarzian_floor() {
        let l = MapSpec::logistic(3.0).unwrap();
        assert_eq!(l.schwarzian(0.5), Err(Error::CriticalPoint { x: 0.5 }));
    }

    #[test]
    fn tanh_schwarzian_is_constant() {
        let m = MapSpec::tanh_odd(1.3, 0.7).unwrap();
        for x in [-3.0, -0.4, 0.0, 1.1, 2.5] {
            assert!((m.schwarzian(x).unwrap() + 2.0 * 0.49).abs() < 1e-9);
        }
    }

    #[test]
    fn limits() {
        let w = MapSpec::wright(2.0).unwrap();
        assert_eq!(w.left_limit(), Some(2.0));
        assert_eq!(w.right_limit(), None);
        let mg = MapSpec::mackey_glass(2.0, 20.0).unwrap();
        assert_eq!(mg.left_limit(), Some(2.0));
        assert_eq!(mg.right_limit(), Some(0.0));
        let t = MapSpec::taylor(6.15385, 73.8462, 10.0).unwrap();
        let x0 = t.critical_point().unwrap();
        assert!(t.bundle(x0).f1.abs() < 1e-12);
    }

    #[test]
    fn fn_map_matches_closed_form() {
        let closed = MapSpec::lasota_wazewska(1.0, 0.5).unwrap();
        let numeric = FnMap::new(|x: f64| libm::exp(-0.5 * x), Interval::NON_NEGATIVE);
        let (a, b) = (closed.bundle(1.5), numeric.bundle(1.5));
        assert!((a.f1 - b.f1).abs() < 1e-9);
        assert!((a.f2 - b.f2).abs() < 1e-7);
        assert!((a.f3 - b.f3).abs() < 1e-4);
        assert_eq!(b.method, DerivativeMethod::FiniteDifference);
    }
}
