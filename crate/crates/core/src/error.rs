use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::verdict::Witness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("space has no points")]
    EmptySpace,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("{labels} labels given for a matrix of side {side}")]
    LabelCount { labels: usize, side: usize },
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("duplicate point {0}")]
    DuplicatePoint(String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("distance axioms violated: {0}")]
    AxiomViolation(Box<Witness<f64>>),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("{0}")]
    CertificateNotFound(String),
    #[error("bracket [{lo}, {hi}] does not straddle the target level {target}")]
    Bracket { lo: f64, hi: f64, target: f64 },
    #[error("invalid weight transform: {0}")]
    Transform(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
