//! Regenerates the data behind the three worked examples: trajectories,
//! bound lines and a summary of published against computed numbers.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use dichotomy_core::bounds::{best_bounds, f_cycle_bounds, g_map_bounds, h_map_bound, wright_F_bounds, wright_basic_bounds};
use dichotomy_core::ddesim::{integrate, simulate_wright_y, square_wave_distance, tail_stats, DdeProblem, History, Trajectory, DEFAULT_TAIL_FRACTION};
use dichotomy_core::{analyze, AnalysisOptions, MapSpec};

use crate::error::{Error, Result, StageExt};
use crate::report::{bounds_csv, num, write_trajectory_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    /// Wright's equation in `y = e^x - 1`, r = 2.
    Ex1,
    /// Mackey-Glass Hill feedback p = 2, n = 20 at tau = 1 and tau = 10.
    Ex2,
    /// The same map at tau = 1 with the g- and h-map bounds.
    Ex3,
}

impl Example {
    pub fn name(&self) -> &'static str {
        match self {
            Example::Ex1 => "ex1",
            Example::Ex2 => "ex2",
            Example::Ex3 => "ex3",
        }
    }
}

/// A published number beside the recomputed one.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: &'static str,
    pub published: f64,
    pub computed: f64,
}

impl Comparison {
    pub fn abs_diff(&self) -> f64 {
        (self.computed - self.published).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reproduction {
    pub example: Example,
    pub comparisons: Vec<Comparison>,
    /// Written files, in creation order.
    pub files: Vec<PathBuf>,
}

impl Reproduction {
    pub fn computed(&self, quantity: &str) -> Option<f64> {
        self.comparisons.iter().find(|c| c.quantity == quantity).map(|c| c.computed)
    }
}

const STEPS: usize = 100;

struct Writer<'a> {
    dir: &'a Path,
    prefix: &'static str,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(format!("{}_{name}", self.prefix));
        fs::write(&path, body).map_err(Error::io(&path))?;
        self.files.push(path);
        Ok(())
    }

    fn trajectory(&mut self, name: &str, traj: &Trajectory, variable: &str) -> Result<()> {
        let path = self.dir.join(format!("{}_{name}", self.prefix));
        let file = fs::File::create(&path).map_err(Error::io(&path))?;
        let mut w = BufWriter::new(file);
        write_trajectory_csv(&mut w, traj, variable, 1.0).map_err(Error::io(&path))?;
        std::io::Write::flush(&mut w).map_err(Error::io(&path))?;
        self.files.push(path);
        Ok(())
    }
}

fn summary(title: &str, comparisons: &[Comparison], notes: &[String]) -> String {
    let mut s = format!("{title}\n\nquantity,published,computed,abs_diff\n");
    for c in comparisons {
        let _ = writeln!(s, "{},{},{},{}", c.quantity, c.published, num(c.computed), num(c.abs_diff()));
    }
    if !notes.is_empty() {
        s.push('\n');
        for n in notes {
            let _ = writeln!(s, "{n}");
        }
    }
    s
}

fn tail_note(label: &str, traj: &Trajectory) -> Result<String> {
    let t = tail_stats(traj, DEFAULT_TAIL_FRACTION).stage("tail")?;
    Ok(format!("{label}: tail [{}, {}] over [{}, {}]", num(t.min), num(t.max), t.window.lo, t.window.hi))
}

fn mg_trajectory(map: MapSpec, tau: f64, history: f64, t_end: f64) -> Result<Trajectory> {
    let problem = DdeProblem::new(1.0, tau, map, History::Constant(history)).stage("simulate")?;
    integrate(&problem, t_end, (STEPS as f64 * tau) as usize).stage("simulate")
}

fn ex1(w: &mut Writer) -> Result<Vec<Comparison>> {
    let r = 2.0;
    let coarse = wright_basic_bounds(r, 0).stage("bounds")?.to_wright_y();
    let fmap = wright_F_bounds(r).stage("bounds")?;
    let comparisons = vec![
        Comparison { quantity: "M1 = e^r - 1", published: 6.389, computed: coarse.upper.unwrap_or(f64::NAN) },
        Comparison { quantity: "M2 = F(-1)", published: 2.112, computed: fmap.upper.unwrap_or(f64::NAN) },
    ];
    let mut notes = vec![format!("m2 = F(F(-1)) = {}", num(fmap.lower.unwrap_or(f64::NAN)))];
    w.text("bounds.csv", &bounds_csv(&best_bounds(&MapSpec::wright(r).stage("map")?, 0.0, 1.0).stage("bounds")?))?;
    for (i, y0) in [0.5, -0.5].into_iter().enumerate() {
        let traj = simulate_wright_y(r, &History::Constant(y0), 60.0, STEPS).stage("simulate")?;
        w.trajectory(&format!("trajectory_{i}.csv"), &traj, "y")?;
        notes.push(tail_note(&format!("trajectory_{i} (y = {y0} on [-1, 0])"), &traj)?);
    }
    w.text("summary.txt", &summary("ex1: y' = -r y(t-1)(1 + y), r = 2", &comparisons, &notes))?;
    Ok(comparisons)
}

fn ex2(w: &mut Writer) -> Result<Vec<Comparison>> {
    let map = MapSpec::mackey_glass(2.0, 20.0).stage("map")?;
    let fp = analyze(&map, &AnalysisOptions::default()).stage("analyze")?.fixed_point.ok_or(Error::Stage {
        stage: "analyze",
        source: dichotomy_core::Error::Classification("no fixed point"),
    })?;
    let f = f_cycle_bounds(&map).stage("bounds")?;
    let comparisons = vec![
        Comparison { quantity: "K", published: 1.0, computed: fp.k },
        Comparison { quantity: "f'(K)", published: -10.0, computed: fp.derivative_at_k },
        Comparison { quantity: "alpha", published: 0.0, computed: f.lower.unwrap_or(f64::NAN) },
        Comparison { quantity: "beta", published: 2.0, computed: f.upper.unwrap_or(f64::NAN) },
    ];
    let mut notes = Vec::new();
    let cycle = dichotomy_core::TwoCycle {
        alpha: f.lower.unwrap_or(f64::NAN),
        beta: f.upper.unwrap_or(f64::NAN),
        residuals: (0.0, 0.0),
    };
    for (tau, t_end) in [(1.0, 100.0), (10.0, 500.0)] {
        w.text(&format!("bounds_tau{tau}.csv"), &bounds_csv(&best_bounds(&map, 1.0, tau).stage("bounds")?))?;
        let traj = mg_trajectory(map, tau, 0.5, t_end)?;
        w.trajectory(&format!("trajectory_tau{tau}.csv"), &traj, "x")?;
        notes.push(tail_note(&format!("tau = {tau} (x = 0.5 on [-tau, 0])"), &traj)?);
        notes.push(format!("tau = {tau}: share of tail within 0.1 of alpha or beta = {}", num(square_wave_distance(&traj, &cycle, 0.1))));
    }
    w.text("summary.txt", &summary("ex2: x' = -x + f(x(t - tau)), f(x) = p / (1 + x^n), p = 2, n = 20", &comparisons, &notes))?;
    Ok(comparisons)
}

fn ex3(w: &mut Writer) -> Result<Vec<Comparison>> {
    let map = MapSpec::mackey_glass(2.0, 20.0).stage("map")?;
    let tau = 1.0;
    let g = g_map_bounds(&map, tau).stage("bounds")?;
    let h0 = h_map_bound(&map, tau).stage("bounds")?;
    let comparisons = vec![
        Comparison { quantity: "g(0)", published: 1.6321, computed: g.upper.unwrap_or(f64::NAN) },
        Comparison { quantity: "g^2(0)", published: 0.3679, computed: g.lower.unwrap_or(f64::NAN) },
        Comparison { quantity: "h(0)", published: 1.6071, computed: h0 },
    ];
    w.text("bounds.csv", &bounds_csv(&best_bounds(&map, 1.0, tau).stage("bounds")?))?;
    let mut notes = Vec::new();
    for (i, x0) in [0.3, 1.8].into_iter().enumerate() {
        let traj = mg_trajectory(map, tau, x0, 300.0)?;
        w.trajectory(&format!("trajectory_{i}.csv"), &traj, "x")?;
        notes.push(tail_note(&format!("trajectory_{i} (x = {x0} on [-1, 0])"), &traj)?);
    }
    w.text("summary.txt", &summary("ex3: p = 2, n = 20, tau = 1", &comparisons, &notes))?;
    Ok(comparisons)
}

/// Writes every file of `example` into `out`, creating the directory.
pub fn reproduce(example: Example, out: &Path) -> Result<Reproduction> {
    fs::create_dir_all(out).map_err(Error::io(out))?;
    let mut w = Writer { dir: out, prefix: example.name(), files: Vec::new() };
    let comparisons = match example {
        Example::Ex1 => ex1(&mut w)?,
        Example::Ex2 => ex2(&mut w)?,
        Example::Ex3 => ex3(&mut w)?,
    };
    Ok(Reproduction { example, comparisons, files: w.files })
}
