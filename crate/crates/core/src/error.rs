use std::io;

use thiserror::Error;

/// Errors produced by the stream model, the samplers and the verification harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed stream: item {item} at position {position} is outside [1, {universe}]")]
    OutOfRange {
        item: u64,
        position: usize,
        universe: u64,
    },

    #[error("frequency moment F_{k} overflows 128-bit arithmetic")]
    Overflow { k: u32 },

    #[error("index ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("dimension mismatch: expected {expected} items, got {actual}")]
    DimensionMismatch { expected: u64, actual: u64 },

    #[error("source ended after {seen} of {expected} items")]
    PrematureEnd { seen: u64, expected: u64 },

    #[error("residual moment is zero; use the single-element path")]
    Degenerate,

    #[error("enumeration of {tuples} index tuples exceeds the guard of {limit}")]
    GuardExceeded { tuples: u128, limit: u128 },

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stream format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
