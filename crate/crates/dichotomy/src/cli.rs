use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dichotomy_core::bounds::Coordinates;
use dichotomy_core::ddesim::{default_steps, integrate, tail_stats, DdeProblem, History, DEFAULT_TAIL_FRACTION};
use dichotomy_core::linstab::{stability, Linearization};
use dichotomy_core::onedim::find_two_cycle;
use dichotomy_core::{analyze, AnalysisOptions, MapKind, MapSpec};

use crate::certify::{self, certify};
use crate::config::RunConfig;
use crate::error::{Error, Result, StageExt};
use crate::report;
use crate::reproduce::{reproduce, Example};

/// Exit code for a run whose simulations escape the theoretical bounds.
pub const EXIT_CONTAINMENT: i32 = 1;
/// Exit code for unusable input (bad config, arguments or map).
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dichotomy", version, about = "Bounds and simulations for x' = -a x + f(x(t - tau))")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the feedback and report its fixed point and 2-cycle.
    Analyze { config: PathBuf },
    /// Run every applicable bound pipeline.
    Bounds {
        config: PathBuf,
        /// Print CSV rows instead of the text report.
        #[arg(long)]
        csv: bool,
    },
    /// Integrate each history and write trajectory CSVs.
    Simulate {
        config: PathBuf,
        /// Output directory (defaults to the config's, then the current one).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Characteristic roots of lambda + a - b e^{-lambda tau}.
    Stability {
        #[arg(long)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        tau: f64,
    },
    /// Bounds plus simulations; exit code 0 iff every history is contained.
    Certify {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data of a worked example.
    Reproduce {
        #[arg(long, value_enum)]
        example: Example,
        #[arg(long)]
        out: PathBuf,
    },
    /// x' = -a x + b x(t-1) / (1 + x(t-1)^n) from constant histories (no bounds apply).
    Taylor {
        #[arg(long, default_value_t = 6.15385)]
        a: f64,
        #[arg(long, default_value_t = 73.8462)]
        b: f64,
        #[arg(long, default_value_t = 10.0)]
        n: f64,
        #[arg(long = "history", default_values_t = [0.5, 1.5])]
        histories: Vec<f64>,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn out_dir(flag: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    flag.or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."))
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(Error::io(path))
}

fn write_trajectory(path: &Path, traj: &dichotomy_core::ddesim::Trajectory, variable: &str, scale: f64) -> Result<()> {
    let file = fs::File::create(path).map_err(Error::io(path))?;
    let mut w = BufWriter::new(file);
    report::write_trajectory_csv(&mut w, traj, variable, scale).map_err(Error::io(path))?;
    w.flush().map_err(Error::io(path))
}

fn analyze_cmd(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let opts = AnalysisOptions { grid_size: config.grid_size, ..AnalysisOptions::default() };
    let an = analyze(&config.map, &opts).stage("analyze")?;
    let mut s = format!("map: {}\nclass: {:?}\n", report::map_label(&config.map), an.class.kind);
    if let (Some(v), Some(w)) = (an.class.violation, an.class.witness) {
        s.push_str(&format!("violation: {v:?} at x = {w}\n"));
    }
    s.push_str(&format!("probe window: {}\n", an.window));
    if let Some(x0) = an.class.critical_point {
        s.push_str(&format!("critical point: {x0}\n"));
    }
    if let Some(iv) = an.interval {
        s.push_str(&format!("invariant interval: {iv}\n"));
    }
    if let Some(fp) = an.fixed_point {
        s.push_str(&format!("K = {}\nf'(K) = {}\n", fp.k, fp.derivative_at_k));
    }
    if an.class.kind != MapKind::Neither {
        match find_two_cycle(&config.map, &an.class) {
            Ok(Some(c)) => s.push_str(&format!("2-cycle: alpha = {}, beta = {}, multiplier = {:e}\n", c.alpha, c.beta, c.multiplier(&config.map))),
            Ok(None) => s.push_str("2-cycle: none (|f'(K)| <= 1)\n"),
            Err(e) => s.push_str(&format!("2-cycle: {e}\n")),
        }
    }
    out.write_all(s.as_bytes()).map_err(Error::io("stdout"))?;
    Ok(0)
}

fn simulate_cmd(config: &RunConfig, dir: &Path, out: &mut dyn Write) -> Result<i32> {
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let coords = certify::coordinates(config);
    let histories = match &config.histories {
        Some(h) => h.clone(),
        None => certify::histories(config, &certify::theory(config)?)?,
    };
    let variable = if coords == Coordinates::Y { "y" } else { "x" };
    for (i, h) in histories.iter().enumerate() {
        let (traj, scale) = certify::simulate(config, coords, h, config.t_end)?;
        let path = dir.join(format!("trajectory_{i}.csv"));
        write_trajectory(&path, &traj, variable, scale)?;
        let tail = tail_stats(&traj, config.tail_fraction).stage("tail")?;
        writeln!(out, "{} [{}]: tail [{}, {}]", path.display(), report::history_label(h), tail.min, tail.max)
            .map_err(Error::io("stdout"))?;
    }
    Ok(0)
}

fn certify_cmd(config: &RunConfig, dir: Option<PathBuf>, out: &mut dyn Write) -> Result<i32> {
    let cert = certify(config)?;
    let text = report::certification_text(&cert);
    out.write_all(text.as_bytes()).map_err(Error::io("stdout"))?;
    if let Some(dir) = dir.or_else(|| config.output_dir.clone()) {
        fs::create_dir_all(&dir).map_err(Error::io(&dir))?;
        write_file(&dir.join("certification.txt"), &text)?;
        write_file(&dir.join("certification.csv"), &report::certification_csv(&cert))?;
        write_file(&dir.join("bounds.csv"), &report::bounds_csv(&cert.theory))?;
    }
    Ok(if cert.passed() { 0 } else { EXIT_CONTAINMENT })
}

fn taylor_cmd(a: f64, b: f64, n: f64, histories: &[f64], t_end: f64, dir: Option<PathBuf>, out: &mut dyn Write) -> Result<i32> {
    // s = a t turns the equation into x' = -x + (b/a) x(s - a) / (1 + x(s - a)^n)
    let map = MapSpec::taylor(a, b, n).stage("map")?;
    let an = analyze(&map, &AnalysisOptions::default()).stage("analyze")?;
    writeln!(out, "map: {} class {:?}", report::map_label(&map), an.class.kind).map_err(Error::io("stdout"))?;
    if let Some(dir) = &dir {
        fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    for (i, &x0) in histories.iter().enumerate() {
        let problem = DdeProblem::new(1.0, a, map, History::Constant(x0)).stage("simulate")?;
        let traj = integrate(&problem, t_end * a, default_steps(a)).stage("simulate")?;
        let tail = tail_stats(&traj, DEFAULT_TAIL_FRACTION).stage("tail")?;
        writeln!(out, "history {x0}: tail [{}, {}]", tail.min, tail.max).map_err(Error::io("stdout"))?;
        if let Some(dir) = &dir {
            write_trajectory(&dir.join(format!("taylor_{i}.csv")), &traj, "x", 1.0 / a)?;
        }
    }
    Ok(0)
}

/// Runs a parsed command; `Ok` carries the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Analyze { config } => analyze_cmd(&RunConfig::load(&config)?, out),
        Command::Bounds { config, csv } => {
            let best = certify::theory(&RunConfig::load(&config)?)?;
            let body = if csv { report::bounds_csv(&best) } else { report::bounds_text(&best) };
            out.write_all(body.as_bytes()).map_err(Error::io("stdout"))?;
            Ok(0)
        }
        Command::Simulate { config, out: dir } => {
            let config = RunConfig::load(&config)?;
            simulate_cmd(&config, &out_dir(dir, &config), out)
        }
        Command::Stability { a, b, tau } => {
            let lin = Linearization::new(a, b, tau).stage("stability")?;
            let r = stability(&lin).stage("stability")?;
            let tau0 = r.tau0.map_or("none".to_string(), |t| t.to_string());
            writeln!(out, "N = {}\ntau0 = {tau0}\nlocally stable: {}", r.n, r.locally_stable).map_err(Error::io("stdout"))?;
            Ok(0)
        }
        Command::Certify { config, out: dir } => certify_cmd(&RunConfig::load(&config)?, dir, out),
        Command::Reproduce { example, out: dir } => {
            let rep = reproduce(example, &dir)?;
            for c in &rep.comparisons {
                writeln!(out, "{}: published {} computed {} diff {:.3e}", c.quantity, c.published, c.computed, c.abs_diff())
                    .map_err(Error::io("stdout"))?;
            }
            for f in &rep.files {
                writeln!(out, "wrote {}", f.display()).map_err(Error::io("stdout"))?;
            }
            Ok(0)
        }
        Command::Taylor { a, b, n, histories, t_end, out: dir } => taylor_cmd(a, b, n, &histories, t_end, dir, out),
    }
}

/// Parses `args`, runs the command and maps every outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
