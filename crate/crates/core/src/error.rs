use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient observations: need at least {needed}, got {got}")]
    InsufficientObservations { needed: usize, got: usize },

    #[error("non-positive price {value} at index {index}")]
    NonPositivePrice { index: usize, value: f64 },

    #[error("zero variance")]
    ZeroVariance,

    #[error("window of {window} exceeds series length {len}")]
    WindowTooLong { window: usize, len: usize },

    #[error("rank-deficient design; collinear columns: {}", columns.join(", "))]
    Collinear { columns: Vec<String> },

    #[error("timestamps not strictly increasing at index {index}")]
    UnorderedDates { index: usize },

    #[error("length mismatch: {dates} timestamps but {values} values")]
    LengthMismatch { dates: usize, values: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("sentiment value {value} at index {index} is outside [0, 100]")]
    SentimentRange { index: usize, value: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("diagram contains an infinite death")]
    InfiniteDeath,

    #[error("particle filter failed at step {step}: all particle weights vanished")]
    FilterFailure { step: usize },

    #[error("all {replicates} estimation replicates failed")]
    EstimationFailed { replicates: usize },

    #[error("inverse transform left an imaginary residue of {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("only {survivors} of {requested} surrogate realizations succeeded")]
    TooFewRealizations { survivors: usize, requested: usize },

    #[error("series share no common dates")]
    EmptyJoin,

    #[error("empty input")]
    Empty,
}
