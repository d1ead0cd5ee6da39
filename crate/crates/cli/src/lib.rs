//! Orbit-spec ingestion, command dispatch and verification reports for the
//! `weightlab` binary.

pub mod commands;
pub mod report;
pub mod spec;
pub mod sweep;

pub use commands::{run_command, Command, Params};
pub use report::{Record, Report, Status};
pub use spec::{load, OrbitSpec, Parsed};

/// Errors that abort a run with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("resource limit: {0}")]
    Resource(String),
}

impl From<weightlab_core::Error> for CliError {
    fn from(e: weightlab_core::Error) -> CliError {
        match e {
            weightlab_core::Error::Resource(m) => CliError::Resource(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Exit code for a finished report: 0 when every record passes, 1 otherwise.
pub fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        0
    } else {
        1
    }
}
