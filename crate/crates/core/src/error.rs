use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid configuration `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("region has no quadrature support: {0}")]
    NoQuadratureSupport(String),

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("certified proxy budget {budget:e} exceeds tolerance {tolerance:e}")]
    BudgetExceeded { budget: f64, tolerance: f64 },

    #[error("time grid mismatch: {0}")]
    GridMismatch(String),

    #[error("conjugate gradient stalled after {iterations} iterations, relative residual {final_residual:e}")]
    CgNotConverged {
        iterations: usize,
        final_residual: f64,
        history: Vec<f64>,
    },

    #[error("ill-posed: {0}")]
    IllPosed(String),

    #[error("range inclusion fails: relative residual {residual:e} above {tolerance:e}")]
    RangeFailure { residual: f64, tolerance: f64 },
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Errors raised by numerical solvers rather than by bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::CgNotConverged { .. }
                | Error::IllPosed(_)
                | Error::RangeFailure { .. }
                | Error::BudgetExceeded { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
