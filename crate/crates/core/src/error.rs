use thiserror::Error;

/// Errors raised by the numerical kernels and the verification engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("eigenvalue {eigenvalue} lies outside the domain of `{function}`")]
    Domain { function: String, eigenvalue: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e} (threshold {threshold:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("matrix is singular: smallest |eigenvalue| {min_abs_eigenvalue:e}")]
    Singular { min_abs_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("map `{0}` is not unital")]
    NotUnital(String),

    #[error("trace has a non-negligible imaginary part: {re} + {im}i")]
    ImaginaryResidue { re: f64, im: f64 },

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
