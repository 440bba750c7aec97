use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure in {context} (matrix hash {matrix_hash:016x})")]
    NumericalFailure { context: String, matrix_hash: u64 },

    #[error("singular system in {context}: condition estimate {condition:e}")]
    Singular { context: String, condition: f64 },

    #[error(
        "support enumeration needs {supports} supports, budget is {budget}; \
         use the randomized lower bound instead"
    )]
    BudgetExceeded { supports: u128, budget: u64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("no convergence after {iterations} iterations (duality gap {gap:e})")]
    NotConverged { iterations: usize, gap: f64 },

    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::UnsupportedTarget(_) | Error::BudgetExceeded { .. } => 2,
            Error::NumericalFailure { .. }
            | Error::Singular { .. }
            | Error::Infeasible(_)
            | Error::NotConverged { .. } => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }
}
