use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("entry ({row}, {column}) is negative: {value}")]
    NegativeEntry {
        row: usize,
        column: usize,
        value: f64,
    },

    #[error("entry ({row}, {column}) is not finite")]
    NonFiniteEntry { row: usize, column: usize },

    #[error("column {column} sums to {sum}, expected 1")]
    ColumnSumMismatch { column: usize, sum: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("hypermatrix needs {entries} entries, above the limit of {limit}")]
    TooLarge { entries: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a stochastic vector: {0}")]
    NotStochasticVector(String),

    #[error("matrix is not column-stochastic: {0}")]
    NotStochastic(String),

    #[error("invalid alpha {0}")]
    InvalidAlpha(f64),

    #[error("linear solve failed: {0}")]
    SolveFailed(String),

    #[error("transition matrix has {0} recurrent classes")]
    MultipleRecurrentClasses(usize),

    #[error("step size {0} outside (0, 1]")]
    StepOutOfRange(f64),

    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("the 2x2 identity has no unique stationary distribution")]
    IdentityMatrix,

    #[error("hypermatrix violates Property B at x = {0}")]
    PropertyBViolation(f64),

    #[error("x = {x} is not an equilibrium (|f(x)| = {residual})")]
    NotAnEquilibrium { x: f64, residual: f64 },

    #[error("closed-form trajectory not applicable: {0}")]
    NotApplicable(String),

    #[error("an equilibrium at {0} lies between the endpoints")]
    EquilibriumCrossed(f64),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("negative log-likelihood is infinite")]
    InfiniteNll,

    #[error("every candidate hypermatrix assigns zero probability to some transition")]
    AllTransitionsUnobservable,

    #[error("state {state} outside 1..={dim}")]
    StateOutOfRange { state: usize, dim: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
