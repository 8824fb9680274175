//! Method-of-steps integration of `x'(t) = -a x(t) + f(x(t - tau))`.
//!
//! The step is `h = tau/m`, so delayed values at the RK4 nodes are stored
//! grid values. The midpoint stages need `x(t + h/2 - tau)`, taken from the
//! cubic Hermite interpolant of the stored values and derivatives.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::maps::{Feedback, MapSpec};
use crate::onedim::TwoCycle;

/// Smallest admissible number of steps per delay.
pub const MIN_STEPS: usize = 20;
/// `|x|` beyond this aborts the integration.
pub const BLOW_UP: f64 = 1e12;
/// Default share of the time range used for tail statistics.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;
/// Tail statistics need at least this many delays of solution.
pub const MIN_DELAYS: f64 = 10.0;
const CONVERGED_SPREAD: f64 = 1e-6;
const SAMPLES_PER_STEP: usize = 16;

/// Initial segment on `[-tau, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum History {
    Constant(f64),
    /// `(t, x)` knots with `t` increasing and spanning `[-tau, 0]`.
    Polyline(Vec<(f64, f64)>),
}

impl History {
    fn check(&self, tau: f64) -> Result<()> {
        match self {
            History::Constant(v) if v.is_finite() => Ok(()),
            History::Constant(_) => Err(Error::InvalidHistory("history value must be finite")),
            History::Polyline(knots) => {
                if knots.len() < 2 {
                    return Err(Error::InvalidHistory("a polyline needs at least two knots"));
                }
                if knots.iter().any(|(t, x)| !t.is_finite() || !x.is_finite()) {
                    return Err(Error::InvalidHistory("polyline knots must be finite"));
                }
                if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return Err(Error::InvalidHistory("polyline times must increase"));
                }
                let span = 1e-12 * tau;
                if knots[0].0 > -tau + span || knots[knots.len() - 1].0 < -span {
                    return Err(Error::InvalidHistory("polyline must cover [-tau, 0]"));
                }
                Ok(())
            }
        }
    }

    /// Value at `t` in `[-tau, 0]`.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            History::Constant(v) => *v,
            History::Polyline(knots) => {
                let i = knots.partition_point(|(s, _)| *s <= t).clamp(1, knots.len() - 1);
                let (t0, x0) = knots[i - 1];
                let (t1, x1) = knots[i];
                x0 + (x1 - x0) * (t - t0) / (t1 - t0)
            }
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            History::Constant(v) => alloc::vec![*v],
            History::Polyline(knots) => knots.iter().map(|k| k.1).collect(),
        }
    }

    /// The same segment with `g` applied to every value.
    pub fn map_values(&self, g: impl Fn(f64) -> f64) -> History {
        match self {
            History::Constant(v) => History::Constant(g(*v)),
            History::Polyline(knots) => History::Polyline(knots.iter().map(|&(t, x)| (t, g(x))).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdeProblem<M> {
    pub a: f64,
    pub tau: f64,
    pub map: M,
    pub history: History,
}

impl<M: Feedback> DdeProblem<M> {
    pub fn new(a: f64, tau: f64, map: M, history: History) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter("a must be finite and nonnegative"));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter("tau must be positive"));
        }
        history.check(tau)?;
        let domain = map.domain();
        if history.values().iter().any(|v| !domain.contains(*v)) {
            return Err(Error::InvalidHistory("history leaves the domain of the feedback"));
        }
        Ok(DdeProblem { a, tau, map, history })
    }
}

/// Steps per delay giving `h <= 0.01`, and never fewer than [`MIN_STEPS`].
pub fn default_steps(tau: f64) -> usize {
    (libm::ceil(tau / 0.01) as usize).max(MIN_STEPS)
}

/// Node values and derivatives on the grid `t_j = -tau + j h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub tau: f64,
    pub h: f64,
    /// Steps per delay; node `m` is `t = 0`.
    pub m: usize,
    pub values: Vec<f64>,
    /// Right derivative at each node.
    pub derivs: Vec<f64>,
    /// Left derivative at `t = 0`, from the history.
    pub history_end_slope: f64,
}

impl Trajectory {
    /// A trajectory from raw node data; `values[m]` sits at `t = 0`.
    pub fn from_samples(tau: f64, m: usize, values: Vec<f64>, derivs: Vec<f64>, history_end_slope: f64) -> Result<Self> {
        if values.len() != derivs.len() || values.len() < m + 2 || m == 0 || !(tau > 0.0) {
            return Err(Error::InvalidParameter("inconsistent trajectory samples"));
        }
        Ok(Trajectory { tau, h: tau / m as f64, m, values, derivs, history_end_slope })
    }

    pub fn t_start(&self) -> f64 {
        -self.tau
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    pub fn time(&self, j: usize) -> f64 {
        (j as f64 - self.m as f64) * self.h
    }

    /// `(t_j, x_j)` for `t_j >= 0`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (self.m..self.values.len()).map(move |j| (self.time(j), self.values[j]))
    }

    /// Values and end slopes of step `j`, i.e. `[t_j, t_{j+1}]`.
    fn step(&self, j: usize) -> (f64, f64, f64, f64) {
        let d1 = if j + 1 == self.m { self.history_end_slope } else { self.derivs[j + 1] };
        (self.values[j], self.values[j + 1], self.derivs[j], d1)
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let last = self.values.len() - 2;
        let pos = (t - self.t_start()) / self.h;
        let j = (libm::floor(pos).max(0.0) as usize).min(last);
        (j, (pos - j as f64).clamp(0.0, 1.0))
    }

    /// Dense output by cubic Hermite interpolation. `t` is clamped to the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        let (j, s) = self.locate(t);
        let (y0, y1, d0, d1) = self.step(j);
        hermite(y0, y1, d0, d1, self.h, s)
    }

    /// `(t, x(t))` sampled at `per_step` points inside every step of `[from, t_end]`.
    pub fn dense(&self, from: f64, per_step: usize) -> Vec<(f64, f64)> {
        let (j0, _) = self.locate(from);
        let mut out = Vec::new();
        for j in j0..self.values.len() - 1 {
            let (y0, y1, d0, d1) = self.step(j);
            for k in 0..per_step {
                let s = k as f64 / per_step as f64;
                let t = self.time(j) + s * self.h;
                if t >= from {
                    out.push((t, hermite(y0, y1, d0, d1, self.h, s)));
                }
            }
        }
        out.push((self.t_end(), self.values[self.values.len() - 1]));
        out
    }

    /// Extremes of the interpolant over `[from, to]`, including critical
    /// points of the cubic inside each step.
    pub fn range(&self, from: f64, to: f64) -> Interval {
        let (j0, _) = self.locate(from);
        let (j1, _) = self.locate(to);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut see = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        see(self.value_at(from));
        see(self.value_at(to));
        for j in j0..=j1 {
            let (y0, y1, d0, d1) = self.step(j);
            let (t0, t1) = (self.time(j), self.time(j + 1));
            if t0 >= from {
                see(y0);
            }
            if t1 <= to {
                see(y1);
            }
            for s in hermite_critical(y0, y1, d0, d1, self.h).into_iter().flatten() {
                let t = t0 + s * self.h;
                if from <= t && t <= to {
                    see(hermite(y0, y1, d0, d1, self.h, s));
                }
            }
        }
        Interval { lo, hi }
    }
}

fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1
}

/// Interior critical points `s` in `(0, 1)` of the Hermite cubic.
fn hermite_critical(y0: f64, y1: f64, d0: f64, d1: f64, h: f64) -> [Option<f64>; 2] {
    // p'(s) = qa s^2 + qb s + qc
    let dy = y1 - y0;
    let qa = -6.0 * dy + 3.0 * h * (d0 + d1);
    let qb = 6.0 * dy - 2.0 * h * (2.0 * d0 + d1);
    let qc = h * d0;
    let inside = |s: f64| (s > 0.0 && s < 1.0).then_some(s);
    if qa.abs() <= 1e-300 {
        if qb == 0.0 {
            return [None, None];
        }
        return [inside(-qc / qb), None];
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return [None, None];
    }
    let sq = libm::sqrt(disc);
    let q = -0.5 * (qb + if qb >= 0.0 { sq } else { -sq });
    let r1 = q / qa;
    let r2 = if q != 0.0 { qc / q } else { r1 };
    [inside(r1), inside(r2)]
}

/// Integrates on `[0, t_end]` with `m_steps` RK4 steps per delay.
pub fn integrate<M: Feedback>(problem: &DdeProblem<M>, t_end: f64, m_steps: usize) -> Result<Trajectory> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter("T must be positive"));
    }
    if m_steps < MIN_STEPS {
        return Err(Error::InvalidParameter("m_steps must be at least 20"));
    }
    let DdeProblem { a, tau, ref map, ref history } = *problem;
    let m = m_steps;
    let h = tau / m as f64;
    let n_steps = libm::ceil(t_end / h - 1e-9) as usize;
    let total = m + n_steps + 1;

    let mut values = Vec::with_capacity(total);
    let mut derivs = Vec::with_capacity(total);
    for j in 0..=m {
        values.push(history.value(-tau + j as f64 * h));
    }
    // history slopes by differences of the resampled nodes
    for j in 0..m {
        let lo = j.saturating_sub(1);
        let hi = j + 1;
        derivs.push((values[hi] - values[lo]) / ((hi - lo) as f64 * h));
    }
    let history_end_slope = (values[m] - values[m - 1]) / h;

    let rhs = |x: f64, delayed: f64| -a * x + map.apply(delayed);
    for i in m..m + n_steps {
        let x = values[i];
        let (d0, d1) = (values[i - m], values[i - m + 1]);
        let s0 = derivs[i - m];
        let s1 = if i - m + 1 == m { history_end_slope } else { derivs[i - m + 1] };
        let mid = 0.5 * (d0 + d1) + h * (s0 - s1) / 8.0;
        let (f0, fm, f1) = (map.apply(d0), map.apply(mid), map.apply(d1));
        let k1 = -a * x + f0;
        let k2 = -a * (x + 0.5 * h * k1) + fm;
        let k3 = -a * (x + 0.5 * h * k2) + fm;
        let k4 = -a * (x + h * k3) + f1;
        derivs.push(k1);
        let next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() || next.abs() > BLOW_UP {
            return Err(Error::Overflow { t: (i + 1 - m) as f64 * h });
        }
        values.push(next);
    }
    let last = values.len() - 1;
    derivs.push(rhs(values[last], values[last - m]));
    Ok(Trajectory { tau, h, m, values, derivs, history_end_slope })
}

/// Empirical `liminf` and `limsup`: extremes over the tail window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailStats {
    /// Tail minimum, the proxy for `m = liminf x`.
    pub min: f64,
    /// Tail maximum, the proxy for `M = limsup x`.
    pub max: f64,
    pub window: Interval,
    /// `max - min` below `1e-6`.
    pub converged: bool,
}

impl TailStats {
    pub fn as_interval(&self) -> Interval {
        Interval { lo: self.min, hi: self.max }
    }
}

/// Extremes of the dense output over the last `fraction` of `[0, T]`.
pub fn tail_stats(traj: &Trajectory, fraction: f64) -> Result<TailStats> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter("tail fraction must lie in (0, 1)"));
    }
    let t_end = traj.t_end();
    let required = MIN_DELAYS * traj.tau;
    if t_end < required * (1.0 - 1e-12) {
        return Err(Error::TooShort { covered: t_end, required });
    }
    let window = Interval::new(t_end * (1.0 - fraction), t_end);
    let r = traj.range(window.lo, window.hi);
    Ok(TailStats { min: r.lo, max: r.hi, window, converged: r.hi - r.lo < CONVERGED_SPREAD })
}

/// Integrates Wright's equation in `y = e^x - 1`,
/// `y'(t) = -r y(t-1) (1 + y(t))`, through the x-equation with
/// `f(x) = -r (e^x - 1)` and unit delay. The whole history must stay above `-1`.
pub fn simulate_wright_y(r: f64, y_history: &History, t_end: f64, m_steps: usize) -> Result<Trajectory> {
    let map = MapSpec::wright(r)?;
    y_history.check(1.0)?;
    if y_history.values().iter().any(|y| !(*y > -1.0)) {
        return Err(Error::InvalidHistory("y history must stay above -1"));
    }
    let problem = DdeProblem::new(0.0, 1.0, map, y_history.map_values(libm::log1p))?;
    let xs = integrate(&problem, t_end, m_steps)?;
    let values: Vec<f64> = xs.values.iter().map(|&x| libm::expm1(x)).collect();
    let derivs = xs.values.iter().zip(&xs.derivs).map(|(&x, &dx)| libm::exp(x) * dx).collect();
    let history_end_slope = libm::exp(xs.values[xs.m]) * xs.history_end_slope;
    Ok(Trajectory { values, derivs, history_end_slope, ..xs })
}

/// Share of the last [`DEFAULT_TAIL_FRACTION`] of the run spent within
/// `band` of `alpha` or `beta`.
pub fn square_wave_distance(traj: &Trajectory, cycle: &TwoCycle, band: f64) -> f64 {
    let from = traj.t_end() * (1.0 - DEFAULT_TAIL_FRACTION);
    let pts = traj.dense(from, SAMPLES_PER_STEP);
    if pts.is_empty() {
        return 0.0;
    }
    let near = pts
        .iter()
        .filter(|(_, x)| (x - cycle.alpha).abs() <= band || (x - cycle.beta).abs() <= band)
        .count();
    near as f64 / pts.len() as f64
}

/// Whether the dense output is strictly positive for every `t > 0`.
pub fn positivity_check(traj: &Trajectory) -> bool {
    let t_end = traj.t_end();
    if traj.values.len() <= traj.m + 1 {
        return true;
    }
    let h = traj.h;
    // the first node is t = 0, which is excluded
    let r = traj.range(h.min(t_end), t_end);
    if !(r.lo > 0.0) {
        return false;
    }
    let (y0, y1, d0, d1) = traj.step(traj.m);
    (1..SAMPLES_PER_STEP).all(|k| hermite(y0, y1, d0, d1, h, k as f64 / SAMPLES_PER_STEP as f64) > 0.0) && y1 > 0.0
}
