use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point lies outside the admissible domain: {0}")]
    DomainViolation(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("Hessian of the Legendre function is singular at the given point")]
    SingularHessian,

    #[error("mirror map has no preimage: {0}")]
    NoPreimage(String),

    #[error("root finder failed: {0}")]
    RootFinding(String),

    #[error("inner solver did not converge after {iterations} iterations (residual {residual:e})")]
    InnerSolver { iterations: usize, residual: f64 },

    #[error("subproblem is not solvable: {0}")]
    Unsolvable(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid oracle request: {0}")]
    Oracle(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
