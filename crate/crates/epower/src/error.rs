//! Command errors and their process exit codes.

use std::path::PathBuf;

/// Failure of a command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] epower_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Precondition or parse failure.
pub const EXIT_PRECONDITION: i32 = 2;
/// Numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;
/// Refusal to exceed a computational budget.
pub const EXIT_BUDGET: i32 = 4;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Self::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        use epower_core::Error as E;
        match self {
            Self::Core(E::BudgetExceeded { .. }) => EXIT_BUDGET,
            Self::Core(
                E::NumericalFailure { .. }
                | E::InternalInconsistency(_)
                | E::ConstructionFailed { .. }
                | E::SingularUpdate { .. }
                | E::Overflow(_),
            ) => EXIT_NUMERICAL,
            _ => EXIT_PRECONDITION,
        }
    }
}
