use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    /// The requested configuration is valid but the operation does not cover it.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Quadrature ran out of budget; the best estimate is carried along.
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("quadrature did not converge: best estimate {value} with error estimate {error:e}")]
    QuadratureNonConvergence { value: f64, error: f64 },
}
