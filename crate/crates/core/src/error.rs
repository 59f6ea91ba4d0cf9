//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two values indexed over different action spaces were combined.
    #[error("mismatched action spaces ({left} vs {right} actions)")]
    SpaceMismatch { left: usize, right: usize },

    /// A probability vector failed validation.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// The operation has no finite form at beta = 0; callers should use the
    /// zero-resource limit branch instead.
    #[error("{0} is undefined at beta = 0")]
    ZeroBeta(&'static str),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exhaustive path enumeration would exceed the fixed budget.
    #[error("enumeration budget exceeded: {paths} paths > {budget}")]
    EnumerationBudget { paths: u128, budget: u64 },

    /// A computation left the representable range of f64.
    #[error("out of range: {0}")]
    OutOfRange(String),
}
