//! Theory against simulation: combined bounds, a battery of integrations and
//! the containment verdict for each.

use dichotomy_core::bounds::{best_bounds, BestBounds, Coordinates, GMap, Pipeline, Verdict};
use dichotomy_core::ddesim::{integrate, positivity_check, simulate_wright_y, tail_stats, DdeProblem, History, TailStats, Trajectory};
use dichotomy_core::onedim::interval_image;
use dichotomy_core::{analyze, Affine, AnalysisOptions, Family, Interval, MapSpec};

use crate::config::{default_t_end, RunConfig};
use crate::error::{Error, Result, StageExt};

/// Absolute slack allowed between empirical extremes and theoretical bounds.
pub const CONTAINMENT_TOL: f64 = 1e-3;
/// `|x(T) - K|` allowed when global stability is claimed.
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// Inflation of `g([m, M])` in the invariance check.
pub const INVARIANCE_TOL: f64 = 1e-6;
/// Inflation of the pipeline ordering check.
pub const ORDERING_TOL: f64 = 1e-9;
/// Quantiles of the bound interval used when no histories are configured.
pub const DEFAULT_QUANTILES: [f64; 3] = [0.1, 0.5, 0.9];

/// Outcome for one initial history.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRun {
    pub history: History,
    pub t_end: f64,
    pub tail: Option<TailStats>,
    pub final_value: f64,
    /// Theory minus empirical extreme at each end (`lo` side is `m - lo`).
    pub slack: Option<(f64, f64)>,
    pub contained: bool,
    /// `[m, M]` inside `g([m, M])`, for `a = 1` runs with bounded attractors.
    pub g_invariant: Option<bool>,
    /// Dense output stays positive, for Hill feedback.
    pub positive: Option<bool>,
    pub error: Option<String>,
}

impl HistoryRun {
    pub fn passed(&self) -> bool {
        self.contained && self.error.is_none() && self.g_invariant != Some(false) && self.positive != Some(false)
    }
}

/// `h(0) <= g(0) <= beta`, each inflated by [`ORDERING_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOrdering {
    pub h_upper: f64,
    pub g_upper: f64,
    pub f_upper: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSummary {
    pub map: MapSpec,
    pub a: f64,
    pub tau: f64,
    pub t_end: f64,
    pub m_steps: usize,
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub problem: ProblemSummary,
    pub theory: BestBounds,
    pub runs: Vec<HistoryRun>,
    pub ordering: Option<PipelineOrdering>,
}

impl Certification {
    pub fn passed(&self) -> bool {
        !self.runs.is_empty() && self.runs.iter().all(HistoryRun::passed)
    }

    /// The variable the bounds and trajectories refer to.
    pub fn variable(&self) -> &'static str {
        match self.theory.coordinates {
            Coordinates::X => "x",
            Coordinates::Y => "y",
        }
    }
}

/// `best_bounds` restricted to the enabled pipelines.
pub fn theory(config: &RunConfig) -> Result<BestBounds> {
    let all = best_bounds(&config.map, config.a, config.tau).stage("bounds")?;
    let kept: Vec<_> = all.reports.into_iter().filter(|r| config.pipelines.enabled(r.pipeline)).collect();
    if kept.is_empty() {
        return Err(Error::Config("every applicable pipeline is disabled".into()));
    }
    // combine re-derives its own summary lines
    let notes = all
        .provenance
        .into_iter()
        .filter(|n| !["lower ", "upper ", "global stability certified"].iter().any(|p| n.starts_with(p)))
        .collect();
    Ok(BestBounds::combine(all.coordinates, all.fixed_point, kept, notes))
}

fn wright_r(config: &RunConfig) -> Option<f64> {
    match config.map.family {
        Family::WrightExp { r } if config.a == 0.0 => Some(r),
        _ => None,
    }
}

/// An interval the attractor lives in, for placing default histories.
fn battery_interval(config: &RunConfig, theory: &BestBounds) -> Result<Interval> {
    if let Some(iv) = theory.interval() {
        return Ok(iv);
    }
    let opts = AnalysisOptions { grid_size: config.grid_size, ..AnalysisOptions::default() };
    let iv = if let Some(r) = wright_r(config) {
        let x = analyze(&MapSpec::wright(r * config.tau).stage("battery")?, &opts).stage("battery")?.interval;
        x.map(|iv| Interval::new(iv.lo.exp_m1(), iv.hi.exp_m1()))
    } else if config.a == 0.0 {
        let scaled = Affine::new(config.map, config.tau, 0.0).stage("battery")?;
        analyze(&scaled, &opts).stage("battery")?.interval
    } else {
        analyze(&config.map, &opts).stage("battery")?.interval
    };
    iv.ok_or(Error::Config("no invariant interval to place default histories in; list histories explicitly".into()))
}

/// The configured histories, or the default battery placed in the bounds.
pub fn histories(config: &RunConfig, theory: &BestBounds) -> Result<Vec<History>> {
    match &config.histories {
        Some(h) => Ok(h.clone()),
        None => Ok(default_battery(battery_interval(config, theory)?)),
    }
}

/// `Y` for Wright's family with `a = 0`, where histories and output are in `y = e^x - 1`.
pub fn coordinates(config: &RunConfig) -> Coordinates {
    if wright_r(config).is_some() {
        Coordinates::Y
    } else {
        Coordinates::X
    }
}

/// Constant histories at [`DEFAULT_QUANTILES`] of `iv`.
pub fn default_battery(iv: Interval) -> Vec<History> {
    DEFAULT_QUANTILES.iter().map(|q| History::Constant(iv.lo + q * iv.width())).collect()
}

/// Integrates one history in the coordinates of the bounds. Wright runs with
/// `a = 0` use `y = e^x - 1` on the rescaled time `t / tau`; the returned
/// factor converts trajectory time back to the original one.
pub fn simulate(config: &RunConfig, coordinates: Coordinates, history: &History, t_end: f64) -> Result<(Trajectory, f64)> {
    if let (Coordinates::Y, Some(r)) = (coordinates, wright_r(config)) {
        let tau = config.tau;
        let scaled = match history {
            History::Constant(v) => History::Constant(*v),
            History::Polyline(k) => History::Polyline(k.iter().map(|&(t, y)| (t / tau, y)).collect()),
        };
        let traj = simulate_wright_y(r * tau, &scaled, t_end / tau, config.m_steps).stage("simulate")?;
        return Ok((traj, tau));
    }
    let problem = DdeProblem::new(config.a, config.tau, config.map, history.clone()).stage("simulate")?;
    Ok((integrate(&problem, t_end, config.m_steps).stage("simulate")?, 1.0))
}

fn run_one(config: &RunConfig, theory: &BestBounds, history: &History, t_end: f64) -> HistoryRun {
    let mut run = HistoryRun {
        history: history.clone(),
        t_end,
        tail: None,
        final_value: f64::NAN,
        slack: None,
        contained: false,
        g_invariant: None,
        positive: None,
        error: None,
    };
    let traj = match simulate(config, theory.coordinates, history, t_end) {
        Ok((traj, _)) => traj,
        Err(e) => {
            run.error = Some(e.to_string());
            return run;
        }
    };
    run.final_value = *traj.values.last().unwrap_or(&f64::NAN);
    let tail = match tail_stats(&traj, config.tail_fraction) {
        Ok(t) => t,
        Err(e) => {
            run.error = Some(format!("tail: {e}"));
            return run;
        }
    };
    run.tail = Some(tail);
    match theory.verdict {
        Verdict::GlobalStability => {
            run.contained = (run.final_value - theory.fixed_point).abs() < CONVERGENCE_TOL;
        }
        Verdict::BoundedByInterval => {
            let lo = theory.lower.map_or(f64::NEG_INFINITY, |(v, _)| v);
            let hi = theory.upper.map_or(f64::INFINITY, |(v, _)| v);
            run.slack = Some((tail.min - lo, hi - tail.max));
            run.contained = Interval::new(lo, hi).inflate(CONTAINMENT_TOL).contains_interval(&tail.as_interval());
            if config.a == 1.0 {
                run.g_invariant = Some(g_invariant(config, theory.fixed_point, tail.as_interval()));
            }
        }
    }
    if matches!(config.map.family, Family::MackeyGlassHill { .. }) {
        run.positive = Some(positivity_check(&traj));
    }
    run
}

fn g_invariant(config: &RunConfig, k: f64, tail: Interval) -> bool {
    let Ok(g) = GMap::new(config.map, config.tau, k) else {
        return false;
    };
    interval_image(&g, tail).is_ok_and(|img| img.inflate(INVARIANCE_TOL).contains_interval(&tail))
}

fn ordering(theory: &BestBounds) -> Option<PipelineOrdering> {
    let upper = |p: Pipeline| theory.reports.iter().find(|r| r.pipeline == p).and_then(|r| r.upper);
    let (h, g, f) = (upper(Pipeline::HMap)?, upper(Pipeline::GMap)?, upper(Pipeline::FCycle)?);
    Some(PipelineOrdering { h_upper: h, g_upper: g, f_upper: f, holds: h <= g + ORDERING_TOL && g <= f + ORDERING_TOL })
}

/// Runs the bounds, then every history in parallel, and checks containment.
/// Global-stability claims are checked at `T = max(t_end, 100 tau, 200)`.
pub fn certify(config: &RunConfig) -> Result<Certification> {
    let theory = theory(config)?;
    let histories = histories(config, &theory)?;
    let t_end = match theory.verdict {
        Verdict::GlobalStability => config.t_end.max(default_t_end(config.tau)),
        Verdict::BoundedByInterval => config.t_end,
    };
    let runs = std::thread::scope(|s| {
        let handles: Vec<_> = histories.iter().map(|h| s.spawn(|| run_one(config, &theory, h, t_end))).collect();
        handles.into_iter().map(|h| h.join().expect("integration thread panicked")).collect()
    });
    let ordering = match config.map.family {
        Family::MackeyGlassHill { .. } if config.a == 1.0 => ordering(&theory),
        _ => None,
    };
    Ok(Certification {
        problem: ProblemSummary {
            map: config.map,
            a: config.a,
            tau: config.tau,
            t_end,
            m_steps: config.m_steps,
            tail_fraction: config.tail_fraction,
        },
        theory,
        runs,
        ordering,
    })
}
