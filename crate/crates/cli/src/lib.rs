//! Command implementations behind the `lipsmooth` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_conjugate, cmd_lcnet, cmd_report, cmd_smooth, cmd_verify, run_suite, Outcome};
pub use config::RunConfig;

use lipsmooth::verify::Status;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Library(#[from] lipsmooth::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Io(_) | CliError::Library(_) => 4,
        }
    }
}

/// 0 when every record passed, 1 on any failure, 3 when some record was
/// inconclusive and none failed.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Inconclusive => 3,
    }
}
