use thiserror::Error;

/// Errors raised by the geometry kernel and the algorithms built on it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unsupported dimension {dim} (exact mode handles 1..=3)")]
    UnsupportedDimension { dim: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid weight {0}: must satisfy 0 < t < 1")]
    InvalidWeight(String),
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error("unequal volumes: |A| = {a}, |B| = {b}")]
    UnequalVolumes { a: String, b: String },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("iteration cap of {cap} reached, best residual {residual}")]
    IterationCap { cap: usize, residual: String },
    #[error("pair count {pairs} exceeds cap {cap}")]
    PairCap { pairs: usize, cap: usize },
    #[error("tolerance {tol} is below one cell volume {cell}")]
    ToleranceTooSmall { tol: String, cell: String },
    #[error("no qualifying point: {0}")]
    NoQualifyingPoint(String),
    #[error("Brunn-Minkowski violated: delta = {0} < 0 (kernel bug)")]
    NegativeDeficit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
