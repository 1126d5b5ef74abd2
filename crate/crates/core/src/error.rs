use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("breakpoints must be strictly increasing (violated at index {0})")]
    NonMonotoneBreakpoints(usize),

    #[error("breakpoints must start at 0 and end at 1 (got first={first}, last={last})")]
    EndpointMismatch { first: f64, last: f64 },

    #[error("expected one value per cell: {breakpoints} breakpoints need {} values, got {values}", breakpoints - 1)]
    CountMismatch { breakpoints: usize, values: usize },

    #[error("non-finite value at cell {0}")]
    NonFiniteValue(usize),

    #[error("cell measures must sum to 1 (got {0})")]
    MeasureMismatch(f64),

    #[error("a step function needs at least one cell")]
    EmptyPartition,

    #[error("invalid interval [{left}, {right}]: intervals must satisfy 0 <= left <= right <= 1")]
    InvalidInterval { left: f64, right: f64 },

    #[error("intervals overlap near {0}")]
    OverlappingIntervals(f64),

    #[error("invalid space parameters: {0}")]
    InvalidSpace(String),

    #[error("invalid weight scheme: {0}")]
    InvalidWeights(String),

    #[error("parameter `{name}` must be positive and finite (got {value})")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("parameter `{name}` is invalid (got {value})")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("operation is undefined for the zero function")]
    ZeroFunction,

    #[error("tau must lie in [0,1] (got {0})")]
    TauOutOfRange(f64),

    #[error("exhaustive search limited to {max} cells (got {cells})")]
    TooManyCells { cells: usize, max: usize },

    #[error("exhaustive search limited to {max} levels (got {levels})")]
    TooManyLevels { levels: usize, max: usize },

    #[error("test family must be nonempty")]
    EmptyFamily,

    #[error("test family member {0} is the zero function")]
    ZeroFamilyMember(usize),

    #[error("family members {0} and {1} are not disjoint")]
    NotDisjoint(usize, usize),

    #[error("middle window for family member {0} is empty")]
    EmptyWindow(usize),

    #[error("no closed-form inclusion modulus for this pair of spaces")]
    NoClosedFormModulus,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
