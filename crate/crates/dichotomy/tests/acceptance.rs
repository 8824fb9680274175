//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines are always printed; exits nonzero on any failure.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dichotomy::certify::certify;
use dichotomy::config::RunConfig;
use dichotomy_core::bounds::{g_map_bounds, h_operator, h_map_bound, wright_F_bounds, wright_basic_bounds, WrightFMap};
use dichotomy_core::ddesim::{integrate, simulate_wright_y, tail_stats, DdeProblem, History};
use dichotomy_core::linstab::{count_unstable_pairs, critical_delay, critical_feedback, Linearization};
use dichotomy_core::onedim::{find_fixed_point, find_two_cycle, iterate};
use dichotomy_core::{analyze, Affine, AnalysisOptions, Feedback, FnMap, Interval, MapSpec};

const F_MINUS_ONE_BUDGET: Duration = Duration::from_millis(1);
const STABLE_SIM_BUDGET: Duration = Duration::from_secs(2);
const LINSTAB_BUDGET: Duration = Duration::from_secs(1);

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mg() -> MapSpec {
    MapSpec::mackey_glass(2.0, 20.0).unwrap()
}

fn c1_wright_f_bound() -> Outcome {
    let f = WrightFMap::new(2.0).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let m2 = f.apply(-1.0);
    let elapsed = start.elapsed();
    let report = wright_F_bounds(2.0).map_err(|e| e.to_string())?;
    let upper = report.upper.ok_or("no upper bound")?;
    let ok = (m2 - 2.112).abs() < 1e-3 && upper == m2 && elapsed < F_MINUS_ONE_BUDGET;
    check(ok, format!("F(-1) = {m2} in {elapsed:?}; pipeline upper = {upper}"))
}

fn c2_wright_coarse_bound() -> Outcome {
    let rep = wright_basic_bounds(2.0, 0).map_err(|e| e.to_string())?.to_wright_y();
    let m1 = rep.upper.ok_or("no upper bound")?;
    check((m1 - 6.389).abs() < 1e-3, format!("e^r - 1 = {m1}"))
}

fn c3_g_interval() -> Outcome {
    let rep = g_map_bounds(&mg(), 1.0).map_err(|e| e.to_string())?;
    let (lo, hi) = (rep.lower.ok_or("no lower")?, rep.upper.ok_or("no upper")?);
    check((lo - 0.3679).abs() < 1e-4 && (hi - 1.6321).abs() < 1e-4, format!("[g^2(0), g(0)] = [{lo}, {hi}]"))
}

fn c4_h_bound() -> Outcome {
    let h0 = h_map_bound(&mg(), 1.0).map_err(|e| e.to_string())?;
    // F(x) = x - e^-1 f^-1(x) with f^-1(x) = (2/x - 1)^(1/20)
    let closed = |x: f64| x - (-1.0f64).exp() * (2.0 / x - 1.0).powf(1.0 / 20.0);
    let mut worst = 0.0f64;
    for x in [0.5, 1.0, 1.5] {
        let v = h_operator(&mg(), 1.0, x).map_err(|e| e.to_string())?;
        worst = worst.max((v - closed(x)).abs());
    }
    check((h0 - 1.6071).abs() < 1e-3 && worst < 1e-9, format!("h(0) = {h0}; max |F - closed form| = {worst:.2e}"))
}

fn c5_equilibrium() -> Outcome {
    let fp = find_fixed_point(&mg(), Interval::new(0.5, 1.5)).map_err(|e| e.to_string())?;
    check(
        (fp.k - 1.0).abs() < 1e-12 && (fp.derivative_at_k + 10.0).abs() < 1e-9,
        format!("K = {}, f'(K) = {}", fp.k, fp.derivative_at_k),
    )
}

fn c6_stable_side() -> Outcome {
    let map = MapSpec::wright(1.5).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for x0 in [-0.5, 0.5, 1.0] {
        let p = DdeProblem::new(0.0, 1.0, map, History::Constant(x0)).map_err(|e| e.to_string())?;
        let traj = integrate(&p, 200.0, 100).map_err(|e| e.to_string())?;
        worst = worst.max(traj.values.last().unwrap().abs());
    }
    let elapsed = start.elapsed();
    check(worst < 1e-3 && elapsed < STABLE_SIM_BUDGET, format!("max |x(200)| = {worst:.3e} in {elapsed:?}"))
}

fn c7_unstable_side() -> Outcome {
    let f = wright_F_bounds(2.0).map_err(|e| e.to_string())?;
    let band = Interval::new(f.lower.unwrap(), f.upper.unwrap()).inflate(1e-3);
    let traj = simulate_wright_y(2.0, &History::Constant(0.5), 60.0, 100).map_err(|e| e.to_string())?;
    let wright_tail = tail_stats(&traj, 0.2).map_err(|e| e.to_string())?.as_interval();
    let mut detail = format!("wright y tail {wright_tail} in {band}");
    let mut ok = band.contains_interval(&wright_tail);
    for (tau, t_end, iv) in [(1.0, 300.0, Interval::new(0.3679, 1.6321)), (10.0, 500.0, Interval::new(0.0, 2.0))] {
        let p = DdeProblem::new(1.0, tau, mg(), History::Constant(0.5)).map_err(|e| e.to_string())?;
        let traj = integrate(&p, t_end, (100.0 * tau) as usize).map_err(|e| e.to_string())?;
        let tail = tail_stats(&traj, 0.2).map_err(|e| e.to_string())?.as_interval();
        ok &= iv.inflate(1e-3).contains_interval(&tail);
        detail.push_str(&format!("; tau = {tau}: tail {tail} in {iv}"));
    }
    check(ok, detail)
}

fn linear_exact(t: f64) -> f64 {
    if t <= 1.0 {
        0.5 + 0.5 * (-t).exp()
    } else {
        0.25 + (0.25 * std::f64::consts::E + 0.5) * (-t).exp() + 0.25 * (t - 1.0) * (1.0 - t).exp()
    }
}

fn c8_property_suite() -> Outcome {
    let mut fails = Vec::new();
    // (i) Schwarzian closed forms
    let (a, b) = (1.3, 0.8);
    let (t, at) = (MapSpec::tanh_odd(a, b).unwrap(), MapSpec::arctan_odd(a, b).unwrap());
    let worst_i = (0..100)
        .map(|i| -2.0 + 4.0 * i as f64 / 99.0)
        .map(|x| {
            let q = 1.0 + b * b * x * x;
            let e1 = (t.schwarzian(x).unwrap() + 2.0 * b * b).abs();
            let e2 = (at.schwarzian(x).unwrap() + 2.0 * b * b / (q * q)).abs();
            e1.max(e2)
        })
        .fold(0.0, f64::max);
    if !(worst_i < 1e-9) {
        fails.push(format!("(i) {worst_i:.2e}"));
    }
    // (ii) affine post-composition
    let g = Affine::new(mg(), -0.7, 2.5).unwrap();
    let worst_ii = [0.4, 0.9, 1.3, 1.9]
        .iter()
        .map(|&x| {
            let (sf, sg) = (mg().schwarzian(x).unwrap(), g.schwarzian(x).unwrap());
            (sf - sg).abs() / sf.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    if !(worst_ii < 1e-10) {
        fails.push(format!("(ii) {worst_ii:.2e}"));
    }
    // (iii) [m, M] inside g([m, M]) on certification runs
    for tau in [1.0f64, 2.0, 10.0] {
        let text = format!(
            "a = 1.0\ntau = {tau:?}\nt_end = {:?}\nhistories = [0.3, 0.5, 1.8]\n[map]\nfamily = \"mackey_glass\"\nparams = {{ p = 2.0, n = 20.0 }}\n",
            (50.0 * tau).max(300.0)
        );
        let cert = certify(&RunConfig::from_toml(&text).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if !cert.runs.iter().all(|r| r.g_invariant == Some(true)) {
            fails.push(format!("(iii) tau = {tau}"));
        }
    }
    // (iv) RK4 order on the linear method-of-steps oracle
    let err = |m: usize| {
        let f = FnMap::new(|x| 0.5 * x, Interval::REAL_LINE);
        let p = DdeProblem::new(1.0, 1.0, f, History::Constant(1.0)).unwrap();
        let traj = integrate(&p, 2.0, m).unwrap();
        traj.samples().map(|(t, x)| (x - linear_exact(t)).abs()).fold(0.0, f64::max)
    };
    let ratio = err(20) / err(40);
    if !(12.0..=20.0).contains(&ratio) {
        fails.push(format!("(iv) ratio {ratio}"));
    }
    // (v) 2-cycle residuals and nested refinement intervals
    let w = MapSpec::wright(2.0).unwrap();
    let class = analyze(&w, &AnalysisOptions::default()).unwrap().class;
    let cycle = find_two_cycle(&w, &class).map_err(|e| e.to_string())?.ok_or("no 2-cycle")?;
    let orbit = iterate(&w, 2.0, 8).map_err(|e| e.to_string())?;
    // level k is [f^(2k+1)(c), f^(2k)(c)] with c = r, for k = 0..3
    let level = |k: usize| Interval::new(orbit[2 * k + 1], orbit[2 * k]);
    let nested = (0..3).all(|k| level(k).contains_interval(&level(k + 1)))
        && (0..4).all(|k| level(k).contains_interval(&cycle.as_interval()));
    if !(cycle.residuals.0 < 1e-9 && cycle.residuals.1 < 1e-9 && nested) {
        fails.push(format!("(v) residuals {:?}, nested {nested}", cycle.residuals));
    }
    check(fails.is_empty(), format!("RK4 ratio {ratio:.2}; failures: {fails:?}"))
}

fn c9_linear_stability() -> Outcome {
    let start = Instant::now();
    let r = critical_feedback(0.0, 1.0).map_err(|e| e.to_string())?;
    let tau = critical_delay(0.0, -FRAC_PI_2).map_err(|e| e.to_string())?.ok_or("no critical delay")?;
    let t0 = critical_delay(1.0, -10.0).map_err(|e| e.to_string())?.ok_or("no critical delay")?;
    let n = |tau| count_unstable_pairs(&Linearization { a: 1.0, b: -10.0, tau }).map_err(|e| e.to_string());
    let (below, above) = (n(t0 - 1e-4)?, n(t0 + 1e-4)?);
    let elapsed = start.elapsed();
    let ok = (r - FRAC_PI_2).abs() < 1e-9 && (tau - 1.0).abs() < 1e-12 && below == 0 && above == 1 && elapsed < LINSTAB_BUDGET;
    check(ok, format!("r* = {r}, tau0(1, -10) = {t0}, N = {below} -> {above} in {elapsed:?}"))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c10_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let status = Command::new(env!("CARGO_BIN_EXE_dichotomy"))
            .args(["reproduce", "--example", "ex3", "--out"])
            .arg(dir)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if !status.success() {
            return Err(format!("reproduce exited with {status}"));
        }
    }
    let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
    check(!fa.is_empty() && fa == fb, format!("{} files compared", fa.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 Wright F-bound F(-1) = 2.112", c1_wright_f_bound),
        ("2 Wright coarse bound e^r - 1 = 6.389", c2_wright_coarse_bound),
        ("3 Mackey-Glass g-interval [0.3679, 1.6321]", c3_g_interval),
        ("4 h-bound h(0) = 1.6071", c4_h_bound),
        ("5 equilibrium K = 1, f'(K) = -10", c5_equilibrium),
        ("6 stable side: Wright r = 1.5 decays", c6_stable_side),
        ("7 unstable side: tails inside the bounds", c7_unstable_side),
        ("8 property suite", c8_property_suite),
        ("9 linear stability", c9_linear_stability),
        ("10 determinism of reproduce ex3", c10_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
