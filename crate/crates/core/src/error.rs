use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("item {item} is outside the universe 0..{universe}")]
    ItemOutOfRange { item: usize, universe: usize },

    #[error("the item universe must contain at least one item")]
    EmptyUniverse,

    #[error("scale factor {scale} outside the admissible range [0, {max}]")]
    ScaleOutOfRange { scale: f64, max: f64 },

    #[error("operation requires the first winning set to be contained in the second (n_minus = {n_minus})")]
    ContainmentRequired { n_minus: u64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("angle {value} outside the modelled window [0, {max}]")]
    AngleOutOfWindow { value: f64, max: f64 },

    #[error("probability {0} lies outside [0, 1] beyond rounding tolerance")]
    ProbabilityOutOfRange(f64),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dense dimension {n} exceeds the configured cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("{what}: {count} exceeds the enumeration cap {cap}")]
    EnumerationCapExceeded { what: &'static str, count: u128, cap: u128 },

    #[error("class sizes differ between operands")]
    SizesMismatch,

    #[error("unknown action symbol {0:?}")]
    UnknownAction(char),

    #[error("sequence of length {len} exceeds the episode length {max}")]
    SequenceTooLong { len: usize, max: usize },

    #[error("invalid grid world: {0}")]
    InvalidGrid(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("winning set of the shorter episode is not contained in the longer one ({count} violations)")]
    PrefixContainmentViolated { count: u64 },

    #[error("cross-check failed: {what} differ by {delta:e} (tolerance {tol:e})")]
    CrossCheck { what: &'static str, delta: f64, tol: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
}
