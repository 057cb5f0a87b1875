//! Command-line orchestration for the terracini toolkit: configuration,
//! scans, the reproduction suite and report rendering.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;

use terracini::Error;

pub use config::{Format, RunConfig, VarietyExpr};
pub use report::Report;

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    /// Failure while constructing the variety from the configuration.
    #[error("construction error: {0}")]
    Build(Error),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Build(e) => match core_exit_code(e) {
                EXIT_BUDGET => EXIT_BUDGET,
                _ => EXIT_CONFIG,
            },
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded(_) | Error::SamplingExhausted { .. } => EXIT_BUDGET,
        _ => EXIT_CHECK_FAILED,
    }
}
