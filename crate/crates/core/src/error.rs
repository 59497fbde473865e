use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("selection rows and columns have different lengths ({rows} vs {cols})")]
    SelectionLengthMismatch { rows: usize, cols: usize },
    #[error("indices must be strictly increasing")]
    IndicesNotIncreasing,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("pattern is not admissible")]
    NotAdmissible,
    #[error("pattern must have a star at (1,1)")]
    MissingCornerStar,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not consistent with its pattern: block ({row},{col}) is nonzero")]
    Inconsistent { row: usize, col: usize },
    #[error("entry {value} out of range for GF({q})")]
    EntryOutOfField { value: u64, q: u64 },
    #[error("selection size {k} exceeds limit {limit}")]
    SelectionTooLarge { k: usize, limit: usize },
    #[error("enumeration budget exceeded: {needed} states > budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("zero codeword has no relative weight")]
    ZeroCodeword,
    #[error("message length {got}, expected {expected}")]
    MessageLength { got: usize, expected: usize },
    #[error("k + l = {kl} exceeds block length n = {n}")]
    WitnessTooLong { kl: usize, n: usize },
    #[error("generator is not in normal form")]
    NotNormalForm,
    #[error("pattern must be larger than the elementary pattern")]
    PatternTooSmall,
    #[error("pattern is not irreducible")]
    NotIrreducible,
    #[error("no accepted samples: condition never satisfied")]
    NoAcceptedSamples,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
