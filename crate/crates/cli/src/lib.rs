//! Command-line front end: text formats on disk, ring expressions over named
//! instances, and the verification suites.

pub mod commands;
pub mod corpus;
pub mod expr;
pub mod load;

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("{path}: {source}")]
    Core { path: String, source: decat_core::Error },
    #[error(transparent)]
    Domain(#[from] decat_core::Error),
    #[error(transparent)]
    Syntax(#[from] expr::SyntaxError),
    #[error(transparent)]
    Eval(#[from] expr::EvalError),
    #[error("universe {bounds} has {raw} raw candidates, over the limit of 1000000; pass --force to run anyway")]
    TooLarge { bounds: String, raw: u128 },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn in_file(path: &Path, source: decat_core::Error) -> CliError {
        CliError::Core { path: path.display().to_string(), source }
    }
}

/// What a command printed and the process exit code it asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    pub fn ok(stdout: String) -> Outcome {
        Outcome { stdout, code: 0 }
    }
}
