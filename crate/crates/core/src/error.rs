use thiserror::Error;

/// Errors raised by the algebra, module, operator and diagonalization layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("input is not self-adjoint (defect {defect:.3e}, allowed {allowed:.3e})")]
    NotSelfAdjoint { defect: f64, allowed: f64 },

    #[error("input is not normal (commutator defect {defect:.3e}, allowed {allowed:.3e})")]
    NotNormal { defect: f64, allowed: f64 },

    #[error("element is not positive (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("element is not a central projection")]
    NotCentralProjection,

    #[error("zero module element cannot be normalized")]
    ZeroElement,

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:.3e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {message}")]
    Input { path: String, message: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
