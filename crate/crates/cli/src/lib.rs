//! Command-line front end for `hypdiv`: divergences and bounds for single
//! instances, the two comparison datasets, and the verification suites.
//!
//! Every command produces a [`ReportDocument`], written as CSV (floats at 17
//! significant digits) or JSON. Exit status is 0 when all checks pass, 1 when
//! a check fails and 2 on invalid input.

pub mod commands;
pub mod report;

pub use commands::{run, Cli, Outcome};
pub use report::{Cell, Format, ReportDocument};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] hypdiv::Error),

    #[error("{0}")]
    Usage(String),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Exit status for a failed run: 2 for bad input, 1 otherwise.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Core(_) | Error::Usage(_) => 2,
        Error::Csv(_) | Error::Json(_) | Error::Io(_) => 1,
    }
}
