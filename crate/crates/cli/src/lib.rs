//! Experiment runner for the `grover-dephasing` crate.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Cli, Command, ExperimentConfig};
pub use error::CliError;
pub use run::{emit, execute, RunContext, RunOutput};
