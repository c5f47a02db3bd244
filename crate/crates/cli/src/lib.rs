//! Scenario runner behind the `centralspin` binary.
//!
//! A scenario file names a `kind` and its parameters; running it produces one
//! CSV table whose first line records every parameter.

pub mod output;
pub mod run;
pub mod scenario;

pub use output::{Cell, Table};
pub use run::{execute, oracle_check, Outcome};
pub use scenario::{Kind, Scenario};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameters: {0}")]
    Validation(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Parse(_) => 2,
            Self::Validation(_) => 3,
            Self::Tolerance(_) => 4,
        }
    }
}

impl From<centralspin::Error> for CliError {
    fn from(e: centralspin::Error) -> Self {
        use centralspin::Error as E;
        match e {
            E::NotHermitian { .. } | E::NoConvergence | E::NonFinite(_) | E::NotDensityMatrix(_) => {
                Self::Tolerance(e.to_string())
            }
            _ => Self::Validation(e.to_string()),
        }
    }
}
