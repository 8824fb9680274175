//! Run configuration, certification of bounds against simulation, CSV
//! reports, worked-example reproduction and the `dichotomy` command line.

pub mod certify;
pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod reproduce;

pub use certify::{certify, Certification, HistoryRun};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use reproduce::{reproduce, Example, Reproduction};
