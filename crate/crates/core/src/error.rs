//! Crate-wide error type.

/// Errors reported by constructors, parsers and I/O paths.
///
/// Out-of-range arguments to query operations (positions, ranks, indices)
/// are programming errors and panic instead; see the individual methods.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The per-element bound must be at least 1.
    #[error("element bound must be at least 1")]
    ZeroBound,

    /// The bit-compressed classical layout needs every partial sum to fit in
    /// a single (possibly unaligned) word read, which caps the leaf width.
    #[error("bound {0} too large for the bit-compressed classical layout (requires bound < 2^55 - 1)")]
    BoundTooWide(u64),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown backend tag `{0}`")]
    UnknownBackend(String),

    #[error("unknown benchmark operation `{0}`")]
    UnknownOp(String),

    #[error("malformed bit-vector file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
