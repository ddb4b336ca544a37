use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("scalar field mismatch: {0}")]
    FieldMismatch(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix dimension {0} exceeds the configured cap {1}")]
    DimensionCap(usize, usize),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("singular matrix (rank {rank} of {dim})")]
    Singular { rank: usize, dim: usize },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("matrix is not positive semidefinite: {0}")]
    NotPositiveSemidefinite(String),

    #[error("duplicate nodes: {0}")]
    DuplicateNodes(String),

    #[error("stability matrix pole at z = {0}")]
    Pole(String),

    #[error("eigenvalue iteration did not converge within the iteration cap")]
    EigNonConvergence,

    #[error("triangular canonical form did not converge: best residual {residual:e} exceeds tolerance {tol:e}")]
    TcfNonConvergence { residual: f64, tol: f64 },

    #[error("node recovery failed: {0}")]
    NodeRecovery(String),

    #[error("inconsistent linear system: residual {0}")]
    InconsistentSystem(String),

    #[error("float overflow: {0}")]
    Overflow(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
