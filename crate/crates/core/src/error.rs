use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("operator has no bipartite structure")]
    MissingBipartite,

    #[error("dimension {requested} exceeds configured maximum {max}")]
    ResourceLimit { requested: usize, max: usize },

    #[error("{routine} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { routine: &'static str, iterations: usize, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("SDP solver failed ({status}): primal residual {primal_residual:e}, dual residual {dual_residual:e}, gap {gap:e}")]
    Solver { status: String, primal_residual: f64, dual_residual: f64, gap: f64 },

    #[error("formulation check failed: {0}")]
    Formulation(String),
}
