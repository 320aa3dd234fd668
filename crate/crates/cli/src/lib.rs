//! Batch driver for Weyl-transform experiments.
//!
//! Commands: `matrix`, `scan`, `verify`, `density`, `geometry`. Exit codes:
//! 0 success, 1 verification failure, 2 configuration error, 3 numerical failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Outcome};
pub use config::{resolve, Command, ExperimentConfig, Overrides, Resolved};
pub use error::{CliError, CliResult};
