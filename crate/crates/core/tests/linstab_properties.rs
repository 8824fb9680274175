use dichotomy_core::linstab::*;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Closed-form count: the j-th pair crosses at (arccos(a/b) + 2 pi j)/omega.
fn crossings_below(a: f64, b: f64, tau: f64) -> usize {
    if -b <= a {
        return 0;
    }
    let w = (b * b - a * a).sqrt();
    let first = (a / b).acos();
    (0..).take_while(|j| (first + 2.0 * PI * *j as f64) / w < tau).count()
}

/// Plain argument tally with uniform sampling and no refinement.
fn dense_count(a: f64, b: f64, tau: f64, per_edge: usize) -> i64 {
    let eps = 1e-6 * (a - b);
    let r = a - b + 1.0;
    let corners = [(eps, eps), (r, eps), (r, r), (eps, r), (eps, eps)];
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    for e in 0..4 {
        let (p, q) = (corners[e], corners[e + 1]);
        for i in 0..per_edge {
            let s = i as f64 / per_edge as f64;
            let (x, y) = (p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1));
            let m = b * (-x * tau).exp();
            let arg = (y + m * (y * tau).sin()).atan2(x + a - m * (y * tau).cos());
            if let Some(pa) = prev {
                let mut d = arg - pa;
                while d > PI {
                    d -= 2.0 * PI;
                }
                while d < -PI {
                    d += 2.0 * PI;
                }
                total += d;
            }
            prev = Some(arg);
        }
    }
    let m = b * (-eps * tau).exp();
    let last = (eps + m * (eps * tau).sin()).atan2(eps + a - m * (eps * tau).cos());
    let mut d = last - prev.unwrap();
    while d > PI {
        d -= 2.0 * PI;
    }
    while d < -PI {
        d += 2.0 * PI;
    }
    ((total + d) / (2.0 * PI)).round() as i64
}

#[test]
fn dense_sampling_oracle_agrees() {
    for (a, b, tau) in [(1.0, -10.0, 0.1), (1.0, -10.0, 0.2), (0.0, -2.0, 1.0), (0.5, -3.0, 4.0)] {
        let n = count_unstable_pairs(&Linearization { a, b, tau }).unwrap();
        assert_eq!(n as i64, dense_count(a, b, tau, 25_000), "{a} {b} {tau}");
        assert_eq!(n, crossings_below(a, b, tau));
    }
}

#[test]
fn staircase_in_tau() {
    let (a, b) = (1.0, -10.0);
    let mut prev = 0;
    for i in 1..=60 {
        let tau = 0.05 * i as f64;
        let n = count_unstable_pairs(&Linearization { a, b, tau }).unwrap();
        assert!(n >= prev && n <= prev + 1, "tau = {tau}: {prev} -> {n}");
        assert_eq!(n, crossings_below(a, b, tau), "tau = {tau}");
        prev = n;
    }
    assert!(prev >= 4);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn verdict_matches_critical_delay(a in 0.0f64..3.0, d in 0.1f64..10.0, tau in 0.01f64..5.0) {
        let b = -(a + d);
        let tau0 = critical_delay(a, b).unwrap().unwrap();
        prop_assume!((tau - tau0).abs() > 1e-6);
        let res = stability(&Linearization { a, b, tau }).unwrap();
        prop_assert_eq!(res.locally_stable, tau < tau0);
        prop_assert_eq!(res.tau0, Some(tau0));
    }

    #[test]
    fn delay_dependent_global_criterion_implies_local_stability(s in 1.01f64..30.0, u in 0.0f64..1.0) {
        // tau up to the largest value with (1 - e^{-tau}) s <= 1
        let tau_max = -(1.0 - 1.0 / s).ln();
        let tau = (u * tau_max).max(1e-6);
        prop_assert_eq!(count_unstable_pairs(&Linearization { a: 1.0, b: -s, tau }).unwrap(), 0);
    }
}
