use thiserror::Error;

/// Errors raised by the finite-section model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vectors live in different truncations: {left:?} vs {right:?}")]
    SpaceMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("operation needs at least {needed} variables, space has {got}")]
    TooFewVariables { needed: usize, got: usize },

    #[error("variable slot {slot} out of range for {n} variables")]
    SlotOutOfRange { slot: usize, n: usize },

    #[error("multi-index {index:?} lies outside the box with caps {caps:?}")]
    IndexOutOfBox { index: Vec<usize>, caps: Vec<usize> },

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("constant {re}+{im}i is not unimodular")]
    NotUnimodular { re: f64, im: f64 },

    #[error("zero {re}+{im}i lies outside the admissible disc |a| <= 1 - 1e-9")]
    ZeroOutsideDisc { re: f64, im: f64 },

    #[error("invalid inner sequence: {0}")]
    InvalidSequence(String),

    #[error("partition blocks overlap at {index:?}")]
    PartitionOverlap { index: Vec<usize> },

    #[error("partition misses basis index {index:?}")]
    PartitionIncomplete { index: Vec<usize> },

    #[error("projection family is invalid: {0}")]
    InvalidFamily(String),

    #[error("frame columns are not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },

    #[error("truncation too small: interior mask is empty")]
    EmptyMask,

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
