use dichotomy_core::bounds::{best_bounds, wright_F_bounds, GMap};
use dichotomy_core::ddesim::*;
use dichotomy_core::onedim::{find_two_cycle, TwoCycle};
use dichotomy_core::{analyze, Affine, AnalysisOptions, Feedback, FnMap, Interval, MapSpec};
use std::f64::consts::E;

fn mg() -> MapSpec {
    MapSpec::mackey_glass(2.0, 20.0).unwrap()
}

fn mg_cycle() -> TwoCycle {
    let class = analyze(&mg(), &AnalysisOptions::default()).unwrap().class;
    find_two_cycle(&mg(), &class).unwrap().unwrap()
}

/// x' = -x + 0.5 x(t - 1), x = 1 on [-1, 0], solved by steps.
fn linear_exact(t: f64) -> f64 {
    if t <= 1.0 {
        0.5 + 0.5 * (-t).exp()
    } else {
        0.25 + (0.25 * E + 0.5) * (-t).exp() + 0.25 * (t - 1.0) * (1.0 - t).exp()
    }
}

fn linear_error(m: usize) -> f64 {
    let f = FnMap::new(|x| 0.5 * x, Interval::REAL_LINE);
    let p = DdeProblem::new(1.0, 1.0, f, History::Constant(1.0)).unwrap();
    let traj = integrate(&p, 2.0, m).unwrap();
    traj.samples().map(|(t, x)| (x - linear_exact(t)).abs()).fold(0.0, f64::max)
}

#[test]
fn fourth_order_convergence() {
    let (e1, e2) = (linear_error(20), linear_error(40));
    let ratio = e1 / e2;
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio} ({e1}, {e2})");
    assert!(e2 < 1e-8);
}

#[test]
fn delay_rescaling_equivalence() {
    let tau = 3.0;
    let m = 60;
    let p = DdeProblem::new(1.0, tau, mg(), History::Constant(0.5)).unwrap();
    let slow = integrate(&p, 60.0, m).unwrap();
    // eps x' = -x + f(x(t - 1)) with eps = 1/tau, written as x' = -tau x + tau f
    let scaled = DdeProblem::new(tau, 1.0, Affine::new(mg(), tau, 0.0).unwrap(), History::Constant(0.5)).unwrap();
    let fast = integrate(&scaled, 20.0, m).unwrap();
    for (j, (t, x)) in slow.samples().enumerate().step_by(7) {
        let y = fast.value_at(t / tau);
        assert!((x - y).abs() < 1e-6, "t = {t} (node {j}): {x} vs {y}");
    }
}

#[test]
fn mackey_glass_tails_satisfy_the_limit_relation() {
    let k = 1.0;
    for tau in [1.0, 2.0, 10.0] {
        let g = GMap::new(mg(), tau, k).unwrap();
        for h in [0.3, 0.5, 1.8] {
            let p = DdeProblem::new(1.0, tau, mg(), History::Constant(h)).unwrap();
            let t_end = (100.0 * tau).max(200.0);
            let traj = integrate(&p, t_end, default_steps(tau)).unwrap();
            let st = tail_stats(&traj, DEFAULT_TAIL_FRACTION).unwrap();
            let image = Interval::new(g.apply(st.max), g.apply(st.min)).inflate(1e-6);
            assert!(image.contains_interval(&st.as_interval()), "tau {tau}, h {h}: {st:?} vs {image}");
            assert!(positivity_check(&traj));
        }
    }
}

#[test]
fn wright_tails_satisfy_the_limit_relation() {
    let f = MapSpec::wright(2.0).unwrap();
    for h in [-0.5, 0.5, 1.0] {
        let p = DdeProblem::new(0.0, 1.0, f, History::Constant(h)).unwrap();
        let traj = integrate(&p, 200.0, 100).unwrap();
        let st = tail_stats(&traj, DEFAULT_TAIL_FRACTION).unwrap();
        assert!(st.max <= f.apply(st.min) + 1e-4);
        assert!(st.min >= f.apply(st.max) - 1e-4);
    }
}

#[test]
fn long_delay_oscillates_about_k() {
    // slowly oscillating: zeros of x - K are more than tau apart, and the
    // period is only slightly above 2 tau
    for tau in [2.0, 10.0] {
        let p = DdeProblem::new(1.0, tau, mg(), History::Constant(0.5)).unwrap();
        let traj = integrate(&p, 500.0, default_steps(tau)).unwrap();
        let pts = traj.dense(400.0, 4);
        let zeros: Vec<f64> = pts.windows(2).filter(|w| (w[0].1 - 1.0) * (w[1].1 - 1.0) < 0.0).map(|w| w[0].0).collect();
        assert!(zeros.windows(2).all(|w| w[1] - w[0] > tau), "tau {tau}: {zeros:?}");
        let span = 2.0 * (tau + 1.0);
        let mut t = 400.0;
        while t + span <= traj.t_end() {
            let n = zeros.iter().filter(|z| (t..t + span).contains(*z)).count();
            assert!(n >= 2, "tau {tau}, window at {t}: {n}");
            t += span;
        }
    }
}

#[test]
fn mackey_glass_tails_inside_published_intervals() {
    let cycle = mg_cycle();
    let p = DdeProblem::new(1.0, 10.0, mg(), History::Constant(0.5)).unwrap();
    let long = integrate(&p, 500.0, default_steps(10.0)).unwrap();
    let st = tail_stats(&long, 0.2).unwrap();
    assert!(Interval::new(cycle.alpha - 1e-3, cycle.beta + 1e-3).contains_interval(&st.as_interval()));

    let p = DdeProblem::new(1.0, 1.0, mg(), History::Constant(0.5)).unwrap();
    let short = integrate(&p, 300.0, default_steps(1.0)).unwrap();
    let st1 = tail_stats(&short, 0.2).unwrap();
    assert!(Interval::new(0.3679 - 1e-3, 1.6321 + 1e-3).contains_interval(&st1.as_interval()));
    let best = best_bounds(&mg(), 1.0, 1.0).unwrap().interval().unwrap();
    assert!(best.inflate(1e-3).contains_interval(&st1.as_interval()));

    let near10 = square_wave_distance(&long, &cycle, 0.1);
    let near1 = square_wave_distance(&short, &cycle, 0.1);
    assert!(near10 > near1, "{near10} vs {near1}");
    assert!(near10 > 0.5);
}

#[test]
fn square_wave_distance_oracles() {
    let alpha = 0.25;
    let m = 20;
    let n = m * 30;
    let flat = Trajectory::from_samples(1.0, m, vec![alpha; n], vec![0.0; n], 0.0).unwrap();
    let c = TwoCycle { alpha, beta: 1.75, residuals: (0.0, 0.0) };
    assert_eq!(square_wave_distance(&flat, &c, 1e-9), 1.0);

    // x = K + A sin(w t); within 0.1 A of K +- A iff |sin| >= 0.9
    let (k, amp, w) = (1.0, 0.75, 2.0 * std::f64::consts::PI / 2.0);
    let h = 1.0 / m as f64;
    let times: Vec<f64> = (0..n).map(|j| (j as f64 - m as f64) * h).collect();
    let values = times.iter().map(|t| k + amp * (w * t).sin()).collect();
    let derivs = times.iter().map(|t| amp * w * (w * t).cos()).collect();
    let sine = Trajectory::from_samples(1.0, m, values, derivs, amp * w).unwrap();
    let c = TwoCycle { alpha: k - amp, beta: k + amp, residuals: (0.0, 0.0) };
    let frac = square_wave_distance(&sine, &c, 0.05 * 2.0 * amp);
    let exact = 1.0 - 2.0 * 0.9f64.asin() / std::f64::consts::PI;
    assert!((frac - exact).abs() < 0.02, "{frac} vs {exact}");
    assert!(frac < 0.5);
}

#[test]
fn wright_x_convergence_below_threshold() {
    let f = MapSpec::wright(1.4).unwrap();
    let p = DdeProblem::new(0.0, 1.0, f, History::Constant(0.5)).unwrap();
    let coarse = integrate(&p, 200.0, 50).unwrap();
    let fine = integrate(&p, 200.0, 100).unwrap();
    let (xc, xf) = (coarse.value_at(200.0), fine.value_at(200.0));
    assert!(xf.abs() < 1e-4, "{xf}");
    assert!((xc - xf).abs() < 1e-8);
}

#[test]
fn wright_y_runs() {
    let fb = wright_F_bounds(2.0).unwrap();
    let band = Interval::new(fb.lower.unwrap() - 1e-3, fb.upper.unwrap() + 1e-3);
    let traj = simulate_wright_y(2.0, &History::Constant(0.5), 60.0, 100).unwrap();
    let st = tail_stats(&traj, 0.2).unwrap();
    assert!(band.contains_interval(&st.as_interval()), "{st:?}");
    assert!(traj.values.iter().all(|y| *y > -1.0));

    let slow = simulate_wright_y(1.5, &History::Constant(-0.5), 300.0, 100).unwrap();
    assert!(slow.value_at(200.0).abs() < 1e-3);
    assert!(slow.value_at(300.0).abs() < 1e-4);
}
