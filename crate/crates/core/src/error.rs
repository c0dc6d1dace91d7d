use thiserror::Error;

/// Errors produced by the shape, solver and search routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The grid cannot resolve the domain. `required_h` is a spacing that would.
    #[error("insufficient resolution: {message} (need h <= {required_h:.3e})")]
    Resolution { message: String, required_h: f64 },

    #[error("iteration did not converge: {0}")]
    Convergence(String),

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
