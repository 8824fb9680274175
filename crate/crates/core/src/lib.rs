//! Analysis of scalar delay equations `x'(t) = -a x(t) + f(x(t - tau))` whose
//! feedback `f` has negative Schwarzian derivative.
//!
//! The crate is `no_std` (it needs `alloc`) and covers:
//!
//! * [`maps`] and [`classify`]: feedback families, exact derivatives, the
//!   Schwarzian derivative and S-map / SU-map classification;
//! * [`onedim`]: fixed points, 2-cycles and the dichotomy for the discrete map;
//! * [`bounds`]: interval bounds for the global attractor of the delay equation;
//! * [`linstab`]: the critical delay and the count of unstable characteristic roots;
//! * [`ddesim`]: a method-of-steps RK4 integrator with Hermite dense output.
#![no_std]

extern crate alloc;

pub mod bounds;
pub mod classify;
pub mod ddesim;
pub mod error;
pub mod interval;
pub mod linstab;
pub mod maps;
pub mod onedim;
pub mod roots;

pub use classify::{analyze, classify, invariant_attracting_interval, AnalysisOptions, MapAnalysis, MapClass, MapKind};
pub use error::{Error, Result};
pub use interval::Interval;
pub use maps::{Affine, DerivativeBundle, Family, Feedback, FnMap, MapSpec};
pub use onedim::{FixedPoint, TwoCycle};
