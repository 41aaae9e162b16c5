use std::path::{Path, PathBuf};

use gsvkit_core::Error as CoreError;
use thiserror::Error;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_NOT_SPD: i32 = 4;
pub const EXIT_CONSTANT_COLUMN: i32 = 5;
pub const EXIT_PROBABILITIES: i32 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Input {
        path: PathBuf,
        line: Option<u64>,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("solver failure: {0}")]
    Solver(CoreError),

    #[error("resistance matrix is not SPD: {0}")]
    NotSpd(CoreError),

    #[error("column `{column}` is constant and cannot be standardized")]
    ConstantColumn { column: String },

    #[error("invalid probabilities: {0}")]
    Probabilities(CoreError),

    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn input(path: &Path, line: Option<u64>, message: impl Into<String>) -> Self {
        Self::Input {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::Invalid(_) | CliError::Output(_) => EXIT_INPUT,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::NotSpd(_) => EXIT_NOT_SPD,
            CliError::ConstantColumn { .. } => EXIT_CONSTANT_COLUMN,
            CliError::Probabilities(_) => EXIT_PROBABILITIES,
        }
    }

    /// Shape and argument problems are input errors; everything else
    /// raised by a solve is a solver failure.
    pub fn from_solve(err: CoreError) -> Self {
        match err {
            CoreError::EmptyStack
            | CoreError::ShapeMismatch(_)
            | CoreError::NonFinite { .. }
            | CoreError::InvalidArgument(_)
            | CoreError::DimensionTooLarge { .. }
            | CoreError::TooShort(_)
            | CoreError::NotStandardized => CliError::Invalid(err.to_string()),
            other => CliError::Solver(other),
        }
    }
}
