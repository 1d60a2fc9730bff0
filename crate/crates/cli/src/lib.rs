//! Batch front end: problem-instance files and the subcommands run on them.

pub mod commands;
pub mod instance;

use thiserror::Error;

pub use commands::{run, Command, Flags, Outcome, Verdict};
pub use instance::ProblemInstance;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] endpoint_core::Error),
}
