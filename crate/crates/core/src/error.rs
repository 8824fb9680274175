use core::fmt;

/// Failure modes shared by every analysis in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point or interval lies outside the map's domain.
    Domain { x: f64 },
    /// `|f'(x)|` fell below the derivative floor, so the Schwarzian is undefined.
    CriticalPoint { x: f64 },
    /// A parameter is outside its admissible set.
    InvalidParameter(&'static str),
    /// The bracket handed to a root finder does not change sign.
    NoSignChange { lo: f64, hi: f64 },
    /// The operation needs an S-map (or SU-map) and the map did not classify as one.
    Classification(&'static str),
    /// An SU-map whose critical point escapes its S-map subinterval.
    NotDecidable,
    /// The construction does not apply to this map (e.g. `f^2(x0) < x0`).
    NotApplicable(&'static str),
    /// An orbit left the domain.
    DomainEscape { step: usize, x: f64 },
    /// A numerical inverse of the feedback could not be bracketed.
    Inversion { y: f64 },
    /// The characteristic function vanishes on the counting contour.
    ContourRoot { re: f64, im: f64 },
    /// The integrated solution exceeded the blow-up guard.
    Overflow { t: f64 },
    /// The history segment is not admissible for the problem.
    InvalidHistory(&'static str),
    /// The trajectory does not cover enough delays for tail statistics.
    TooShort { covered: f64, required: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { x } => write!(f, "point {x} is outside the map domain"),
            Error::CriticalPoint { x } => write!(f, "derivative vanishes at {x}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::NoSignChange { lo, hi } => write!(f, "no sign change on [{lo}, {hi}]"),
            Error::Classification(what) => write!(f, "classification error: {what}"),
            Error::NotDecidable => write!(f, "f^2(x0) < x0: dichotomy not decidable for this SU-map"),
            Error::NotApplicable(what) => write!(f, "not applicable: {what}"),
            Error::DomainEscape { step, x } => write!(f, "orbit left the domain at step {step} (x = {x})"),
            Error::Inversion { y } => write!(f, "cannot invert feedback at {y}"),
            Error::ContourRoot { re, im } => {
                write!(f, "characteristic function vanishes near {re} + {im}i on the contour")
            }
            Error::Overflow { t } => write!(f, "solution blew up at t = {t}"),
            Error::InvalidHistory(what) => write!(f, "invalid history: {what}"),
            Error::TooShort { covered, required } => {
                write!(f, "trajectory covers {covered} time units, {required} required")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
