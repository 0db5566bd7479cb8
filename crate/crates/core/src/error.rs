use thiserror::Error;

/// Errors produced by table handling and the asymmetry computations.
///
/// Cell indices are zero-based; messages print them one-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymmError {
    #[error("line {line}: expected {expected} fields, found {found} (table must be square)")]
    NonSquare { line: usize, expected: usize, found: usize },
    #[error("row {row}, column {col}: invalid count {field:?}")]
    InvalidCount { row: usize, col: usize, field: String },
    #[error("row {row}, column {col}: count exceeds 2^53 - 1")]
    CountTooLarge { row: usize, col: usize },
    #[error("table dimension {0} is below the minimum of 2")]
    TooSmall(usize),
    #[error("all off-diagonal counts are zero")]
    NoOffDiagonalMass,
    #[error("normalizer is zero")]
    ZeroNormalizer,
    #[error("cell pair ({}, {}) has no observations in either direction", i + 1, j + 1)]
    ZeroPair { i: usize, j: usize },
    #[error("invalid probability table: {0}")]
    InvalidProbabilities(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("cosine {0} lies outside [-1, 1] beyond rounding tolerance")]
    CosineOutOfRange(f64),
    #[error("support violation at index {0}: p > 0 where q = 0")]
    SupportViolation(usize),
    #[error("value {value} outside domain: {what}")]
    Domain { what: &'static str, value: f64 },
    #[error("gradient undefined: off-diagonal cell ({}, {}) has zero probability", s + 1, t + 1)]
    BoundaryGradient { s: usize, t: usize },
    #[error("index ({i}, {j}) invalid for a {dim}x{dim} table")]
    BadIndex { i: usize, j: usize, dim: usize },
    #[error("no degrees of freedom: every cell pair is empty")]
    NoDegreesOfFreedom,
}

pub type Result<T> = std::result::Result<T, AsymmError>;
