use thiserror::Error;

use crate::pattern::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid pattern: {}", join_violations(.0))]
    InvalidPattern(Vec<Violation>),

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("part index {index} out of range for a pattern with {parts} parts")]
    IndexOutOfRange { index: usize, parts: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("near-degenerate recursive mass: 1 - sum x_i^k = {denominator:e}")]
    DegenerateRecursiveMass { denominator: f64 },

    #[error("{what} exceeds cap: {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("invalid part size tree: {0}")]
    InvalidTree(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// True for errors caused by size limits or malformed input data, as
    /// opposed to bad arguments.
    pub fn is_cap_or_validation(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_))
    }
}
