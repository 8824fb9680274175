//! Text and CSV renderings. Numbers in CSV files use 17 significant digits.

use std::fmt::Write as _;
use std::io::{self, Write};

use dichotomy_core::bounds::{BestBounds, BoundsReport};
use dichotomy_core::ddesim::{History, Trajectory};
use dichotomy_core::{Family, MapSpec};

use crate::certify::{Certification, CONTAINMENT_TOL};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Every grid node from `-tau` on; `time_scale` maps trajectory time to output time.
pub fn write_trajectory_csv<W: Write>(w: &mut W, traj: &Trajectory, variable: &str, time_scale: f64) -> io::Result<()> {
    writeln!(w, "t,{variable}")?;
    for (j, x) in traj.values.iter().enumerate() {
        writeln!(w, "{},{}", num(traj.time(j) * time_scale), num(*x))?;
    }
    Ok(())
}

pub fn write_orbit_csv<W: Write>(w: &mut W, orbit: &[f64]) -> io::Result<()> {
    writeln!(w, "n,x")?;
    for (n, x) in orbit.iter().enumerate() {
        writeln!(w, "{n},{}", num(*x))?;
    }
    Ok(())
}

pub const BOUNDS_HEADER: &str = "pipeline,verdict,lo,hi,margin";

pub fn bounds_row(r: &BoundsReport) -> String {
    format!("{},{},{},{},{}", r.pipeline.name(), r.verdict.name(), opt(r.lower), opt(r.upper), num(r.stability_margin))
}

/// One row per pipeline, then the combined `best` row (empty margin).
pub fn bounds_csv(best: &BestBounds) -> String {
    let mut s = String::from(BOUNDS_HEADER);
    s.push('\n');
    for r in &best.reports {
        s.push_str(&bounds_row(r));
        s.push('\n');
    }
    let (lo, hi) = (best.lower.map(|l| l.0), best.upper.map(|u| u.0));
    let _ = writeln!(s, "best,{},{},{},", best.verdict.name(), opt(lo), opt(hi));
    s
}

pub fn map_label(map: &MapSpec) -> String {
    let params = match map.family {
        Family::WrightExp { r } => format!("r={r}"),
        Family::MackeyGlassHill { p, n } => format!("p={p} n={n}"),
        Family::LasotaWazewska { p, a } => format!("p={p} a={a}"),
        Family::Ricker { lambda } | Family::Logistic { lambda } => format!("lambda={lambda}"),
        Family::TanhOdd { a, b } | Family::ArctanOdd { a, b } => format!("a={a} b={b}"),
        Family::TaylorMG { a, b, n } => format!("a={a} b={b} n={n}"),
    };
    format!("{} {params} on {}", map.family.name(), map.domain)
}

pub fn bounds_text(best: &BestBounds) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", best.verdict.name());
    let _ = writeln!(s, "fixed point: {}", best.fixed_point);
    if let Some((v, p)) = best.lower {
        let _ = writeln!(s, "lower: {v} ({})", p.name());
    }
    if let Some((v, p)) = best.upper {
        let _ = writeln!(s, "upper: {v} ({})", p.name());
    }
    for r in &best.reports {
        let _ = writeln!(s, "  {r}");
        for note in &r.provenance {
            let _ = writeln!(s, "    {note}");
        }
    }
    for note in &best.provenance {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

pub fn history_label(h: &History) -> String {
    match h {
        History::Constant(v) => format!("const {v}"),
        History::Polyline(k) => format!("polyline ({} knots)", k.len()),
    }
}

pub fn certification_text(c: &Certification) -> String {
    let p = &c.problem;
    let mut s = String::new();
    let _ = writeln!(s, "map: {}", map_label(&p.map));
    let _ = writeln!(s, "a = {}, tau = {}, T = {}, steps per delay = {}, tail fraction = {}", p.a, p.tau, p.t_end, p.m_steps, p.tail_fraction);
    s.push_str(&bounds_text(&c.theory));
    let _ = writeln!(s, "containment tolerance: {CONTAINMENT_TOL}");
    for (i, run) in c.runs.iter().enumerate() {
        let status = if run.passed() { "PASS" } else { "FAIL" };
        let _ = write!(s, "history {i} [{}]: {status}", history_label(&run.history));
        if let Some(t) = run.tail {
            let _ = write!(s, " tail=[{}, {}]", t.min, t.max);
        }
        let _ = write!(s, " {}(T)={}", c.variable(), run.final_value);
        if let Some((lo, hi)) = run.slack {
            let _ = write!(s, " slack=({lo:.3e}, {hi:.3e})");
        }
        if let Some(g) = run.g_invariant {
            let _ = write!(s, " g-invariant={g}");
        }
        if let Some(pos) = run.positive {
            let _ = write!(s, " positive={pos}");
        }
        if let Some(e) = &run.error {
            let _ = write!(s, " error: {e}");
        }
        s.push('\n');
    }
    if let Some(o) = c.ordering {
        let _ = writeln!(s, "ordering h <= g <= f upper: {} ({} <= {} <= {})", o.holds, o.h_upper, o.g_upper, o.f_upper);
    }
    let _ = writeln!(s, "certified: {}", c.passed());
    s
}

pub const CERTIFICATION_HEADER: &str = "history,t_end,min,max,final,slack_lo,slack_hi,contained,g_invariant,positive,passed";

pub fn certification_csv(c: &Certification) -> String {
    let flag = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
    let mut s = String::from(CERTIFICATION_HEADER);
    s.push('\n');
    for (i, run) in c.runs.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{},{},{},{},{},{}",
            num(run.t_end),
            opt(run.tail.map(|t| t.min)),
            opt(run.tail.map(|t| t.max)),
            num(run.final_value),
            opt(run.slack.map(|x| x.0)),
            opt(run.slack.map(|x| x.1)),
            run.contained,
            flag(run.g_invariant),
            flag(run.positive),
            run.passed(),
        );
    }
    s
}
