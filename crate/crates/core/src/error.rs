use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count {0} out of range 1..=16")]
    VariableCount(usize),

    #[error("truth table has {got} bits, expected {expected}")]
    TableLength { expected: usize, got: usize },

    #[error("dimension mismatch: expected m={expected}, got m={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("valuation undefined for null function")]
    NullValuation,

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("singular matrix: affine transform must be invertible")]
    SingularMatrix,

    #[error("invalid subspace dimension r={r} for m={m}")]
    Dimension { m: usize, r: usize },

    #[error("{0} overflows the integer range")]
    Overflow(String),

    #[error("enumeration of {count} subspaces exceeds the cap of {cap}")]
    EnumerationCap { count: u64, cap: u64 },

    #[error("flat table is for (m={table_m}, r={table_r}), need (m={m}, r={r})")]
    TableMismatch {
        table_m: usize,
        table_r: usize,
        m: usize,
        r: usize,
    },

    #[error("corrupt flat table: {0}")]
    CorruptTable(String),

    #[error("function is not bent")]
    NotBent,

    #[error("bentness requires an even number of variables, got m={0}")]
    OddDimension(usize),

    #[error("invalid degree band s={s}, t={t} for m={m}")]
    Band { s: usize, t: usize, m: usize },

    #[error("invalid variable permutation: {0}")]
    Permutation(String),

    #[error("classifier disagreement: naive={naive}, paired={paired}")]
    Disagreement { naive: String, paired: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
