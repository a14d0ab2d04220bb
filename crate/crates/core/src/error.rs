use alloc::string::String;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid cost matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid constraint set: {0}")]
    InvalidConstraint(String),
    #[error("size cap exceeded: {what} needs {needed} but the cap is {cap}")]
    SizeCap {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    #[error("not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("invalid endpoints: {0}")]
    InvalidEndpoints(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("subspace cost table has not been built")]
    MissingSubspaceTable,
    #[error("zero off-diagonal cost between {0} and {1}")]
    ZeroCost(usize, usize),
    #[error("instance generation failed: {0}")]
    Generation(String),
}

pub type Result<T> = core::result::Result<T, Error>;
