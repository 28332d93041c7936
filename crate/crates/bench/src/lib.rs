//! Experiment harness for the `convden` denoisers: synthetic harmonic
//! scenarios, multi-trial runs and CSV/JSON reporting.

pub mod certify;
pub mod config;
pub mod error;
pub mod io;
pub mod metrics;
pub mod runner;
pub mod scenario;

pub use error::{BenchError, Result};
