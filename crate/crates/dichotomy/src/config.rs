//! TOML run configuration.
//!
//! ```toml
//! a = 1.0
//! tau = 1.0
//! t_end = 300.0          # optional, defaults to max(100 tau, 200)
//! histories = [0.3, 1.8, [[-1.0, 0.2], [0.0, 1.0]]]
//!
//! [map]
//! family = "mackey_glass"
//! params = { p = 2.0, n = 20.0 }
//! domain = [0.0, "inf"]
//!
//! [pipelines]
//! h_map = false
//!
//! [output]
//! dir = "out"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dichotomy_core::bounds::Pipeline;
use dichotomy_core::ddesim::{default_steps, History, MIN_DELAYS, MIN_STEPS};
use dichotomy_core::{Family, Interval, MapSpec};
use serde::Deserialize;

use crate::error::{Error, Result, StageExt};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Bound {
    Number(f64),
    Text(String),
}

impl Bound {
    fn value(&self) -> Result<f64> {
        match self {
            Bound::Number(x) => Ok(*x),
            Bound::Text(s) => match s.trim() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "inf" | "+inf" => Ok(f64::INFINITY),
                other => Err(Error::Config(format!("domain bound {other:?}: expected a number, \"-inf\" or \"inf\""))),
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    family: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    domain: Option<[Bound; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawHistory {
    Constant(f64),
    Polyline(Vec<[f64; 2]>),
}

/// Which bound pipelines may contribute to the combined interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineToggles {
    pub wright_basic: bool,
    pub wright_f: bool,
    pub f_cycle: bool,
    pub g_map: bool,
    pub h_map: bool,
}

impl Default for PipelineToggles {
    fn default() -> Self {
        PipelineToggles { wright_basic: true, wright_f: true, f_cycle: true, g_map: true, h_map: true }
    }
}

impl PipelineToggles {
    pub fn enabled(&self, p: Pipeline) -> bool {
        match p {
            Pipeline::WrightBasic => self.wright_basic,
            Pipeline::WrightF => self.wright_f,
            Pipeline::FCycle => self.f_cycle,
            Pipeline::GMap => self.g_map,
            Pipeline::HMap => self.h_map,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    a: f64,
    tau: f64,
    t_end: Option<f64>,
    m_steps: Option<usize>,
    tail_fraction: Option<f64>,
    grid_size: Option<usize>,
    histories: Option<Vec<RawHistory>>,
    map: RawMap,
    #[serde(default)]
    pipelines: PipelineToggles,
    output: Option<RawOutput>,
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub map: MapSpec,
    pub a: f64,
    pub tau: f64,
    pub t_end: f64,
    /// Steps per delay.
    pub m_steps: usize,
    pub tail_fraction: f64,
    pub grid_size: usize,
    /// `None` selects the default battery (quantiles of the bound interval).
    pub histories: Option<Vec<History>>,
    pub pipelines: PipelineToggles,
    pub output_dir: Option<PathBuf>,
}

/// `max(100 tau, 200)`, long enough for the asymptotic checks.
pub fn default_t_end(tau: f64) -> f64 {
    (100.0 * tau).max(200.0)
}

fn family_from(name: &str, params: &BTreeMap<String, f64>) -> Result<Family> {
    let names: &[&str] = match name {
        "wright" | "wright_exp" => &["r"],
        "mackey_glass" | "mackey_glass_hill" => &["p", "n"],
        "lasota_wazewska" => &["p", "a"],
        "ricker" | "logistic" => &["lambda"],
        "tanh_odd" | "arctan_odd" => &["a", "b"],
        "taylor" | "taylor_mg" => &["a", "b", "n"],
        other => return Err(Error::Config(format!("unknown map family {other:?}"))),
    };
    if let Some(extra) = params.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(Error::Config(format!("family {name} has no parameter {extra:?} (expected {names:?})")));
    }
    let get = |k: &str| {
        params.get(k).copied().ok_or_else(|| Error::Config(format!("family {name} needs parameter {k:?}")))
    };
    Ok(match name {
        "wright" | "wright_exp" => Family::WrightExp { r: get("r")? },
        "mackey_glass" | "mackey_glass_hill" => Family::MackeyGlassHill { p: get("p")?, n: get("n")? },
        "lasota_wazewska" => Family::LasotaWazewska { p: get("p")?, a: get("a")? },
        "ricker" => Family::Ricker { lambda: get("lambda")? },
        "logistic" => Family::Logistic { lambda: get("lambda")? },
        "tanh_odd" => Family::TanhOdd { a: get("a")?, b: get("b")? },
        "arctan_odd" => Family::ArctanOdd { a: get("a")?, b: get("b")? },
        _ => Family::TaylorMG { a: get("a")?, b: get("b")?, n: get("n")? },
    })
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::validate(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::from_toml(&text)
    }

    fn validate(raw: RawConfig) -> Result<Self> {
        let family = family_from(&raw.map.family, &raw.map.params)?;
        let map = match &raw.map.domain {
            None => MapSpec::new(family),
            Some([lo, hi]) => {
                let (lo, hi) = (lo.value()?, hi.value()?);
                if !(lo < hi) {
                    return Err(Error::Config(format!("domain [{lo}, {hi}] is empty")));
                }
                MapSpec::with_domain(family, Interval::new(lo, hi))
            }
        }
        .stage("map")?;

        if !(raw.a >= 0.0) || !raw.a.is_finite() {
            return Err(Error::Config("a must be finite and nonnegative".into()));
        }
        if !(raw.tau > 0.0) || !raw.tau.is_finite() {
            return Err(Error::Config("tau must be positive".into()));
        }
        let t_end = raw.t_end.unwrap_or_else(|| default_t_end(raw.tau));
        if !t_end.is_finite() || t_end < MIN_DELAYS * raw.tau {
            return Err(Error::Config(format!("t_end must cover at least {MIN_DELAYS} delays")));
        }
        let m_steps = raw.m_steps.unwrap_or_else(|| default_steps(raw.tau));
        if m_steps < MIN_STEPS {
            return Err(Error::Config(format!("m_steps must be at least {MIN_STEPS}")));
        }
        let tail_fraction = raw.tail_fraction.unwrap_or(dichotomy_core::ddesim::DEFAULT_TAIL_FRACTION);
        if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
            return Err(Error::Config("tail_fraction must lie in (0, 1)".into()));
        }
        let grid_size = raw.grid_size.unwrap_or(512);
        if grid_size < 64 {
            return Err(Error::Config("grid_size must be at least 64".into()));
        }
        let histories = match raw.histories {
            None => None,
            Some(list) if list.is_empty() => return Err(Error::Config("histories must not be empty".into())),
            Some(list) => Some(
                list.into_iter()
                    .map(|h| match h {
                        RawHistory::Constant(v) => History::Constant(v),
                        RawHistory::Polyline(knots) => History::Polyline(knots.into_iter().map(|[t, x]| (t, x)).collect()),
                    })
                    .collect(),
            ),
        };
        if let Some(hs) = &histories {
            // run the core checks now, before any computation
            for h in hs {
                let h: &History = h;
                if matches!(family, Family::WrightExp { .. }) && raw.a == 0.0 {
                    // Wright histories are given in y = e^x - 1
                    let ys: Vec<f64> = match h {
                        History::Constant(v) => vec![*v],
                        History::Polyline(k) => k.iter().map(|p| p.1).collect(),
                    };
                    if ys.iter().any(|y| !(*y > -1.0)) {
                        return Err(Error::Config("Wright histories are y = e^x - 1 values and must exceed -1".into()));
                    }
                    let xs = h.map_values(f64::ln_1p);
                    dichotomy_core::ddesim::DdeProblem::new(raw.a, raw.tau, map, xs).stage("history")?;
                    continue;
                }
                dichotomy_core::ddesim::DdeProblem::new(raw.a, raw.tau, map, h.clone()).stage("history")?;
            }
        }
        Ok(RunConfig {
            map,
            a: raw.a,
            tau: raw.tau,
            t_end,
            m_steps,
            tail_fraction,
            grid_size,
            histories,
            pipelines: raw.pipelines,
            output_dir: raw.output.map(|o| o.dir),
        })
    }
}
