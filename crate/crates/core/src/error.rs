use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix dimension must be at least 1")]
    ZeroDimension,

    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    EntryCount { dim: usize, expected: usize, got: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("sequence length must be at least 1")]
    EmptyLength,

    #[error("order k = {k} must satisfy 1 <= k <= n = {n}")]
    InvalidOrder { k: usize, n: usize },

    #[error("enumerating {count} index tuples exceeds the budget of {limit}")]
    BudgetExceeded { count: u128, limit: u128 },

    #[error("random access is not available for sequential model `{0}`")]
    SequentialAccess(&'static str),

    #[error("invalid symbol model: {0}")]
    InvalidModel(String),

    #[error("symbol {symbol} is outside the alphabet 1..={alphabet}")]
    SymbolOutOfRange { symbol: u16, alphabet: usize },

    #[error("sequence provides {available} terms but {needed} were requested")]
    SequenceExhausted { needed: usize, available: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid measure: mu1 = {mu1}, mu2 = {mu2}")]
    InvalidMeasure { mu1: f64, mu2: f64 },

    #[error("invalid walk: {0}")]
    InvalidWalk(String),

    #[error("matrix is not real")]
    NotReal,

    #[error("expected a 2x2 matrix, got {0}x{0}")]
    NotTwoByTwo(usize),

    #[error("Möbius map has a pole at the given point")]
    MobiusPole,

    #[error("the Cayley transform is undefined at -i")]
    CayleyPole,

    #[error("weight function: {0}")]
    InvalidWeight(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("nothing to serialize")]
    EmptyOutput,
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
