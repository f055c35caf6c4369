use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial division left a nonzero remainder")]
    NotDivisible,

    #[error("invalid parameters n={n}, p={p}, q={q}: {reason}")]
    InvalidParams {
        n: usize,
        p: usize,
        q: usize,
        reason: String,
    },

    #[error("closed form needs n >= 3, got n={0}")]
    InvalidN(usize),

    #[error("word must contain at least one 1 and one 0")]
    AllOnesOrAllZeros,

    #[error("row {row} ({state}) is not stochastic: {detail}")]
    NotStochastic {
        row: usize,
        state: String,
        detail: String,
    },

    #[error("source scale {source_scale} differs from target scale {target_scale}")]
    ScaleMismatch {
        source_scale: u64,
        target_scale: u64,
    },

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("lumping assignment is not surjective: target state {0} has an empty fiber")]
    NotSurjective(String),

    #[error("system has {states} states, above the cap of {cap}")]
    StateCapExceeded { states: usize, cap: usize },

    #[error("polynomial of total degree {degree} exceeds the cap of {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },

    #[error("stationary kernel is not one-dimensional: {0}")]
    KernelDimensionNotOne(String),

    #[error("fixture missing: {0}")]
    FixtureMissing(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
