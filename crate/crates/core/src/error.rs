use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max asymmetry {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("eigendecomposition failed to converge")]
    NoConvergence,

    #[error("singular matrix encountered")]
    Singular,

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("invalid space signature: {0}")]
    InvalidSignature(String),

    #[error("unknown factor label `{0}`")]
    UnknownFactor(String),

    #[error("state and operator live on different spaces")]
    SignatureMismatch,

    #[error("operator supports overlap on {0:?}")]
    OverlappingSupport(Vec<String>),

    #[error("truncation leakage {leakage:.3e} exceeds {limit:.1e} at dimension {dim}")]
    Leakage { leakage: f64, limit: f64, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("predicate has the same value at both ends of [{lo}, {hi}]")]
    ConstantPredicate { lo: f64, hi: f64 },

    #[error("search failed: {0}")]
    SearchFailed(String),
}

impl Error {
    /// True for failures of the numerics (truncation, convergence) rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence | Error::Singular | Error::Leakage { .. } | Error::NonFinite | Error::SearchFailed(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
