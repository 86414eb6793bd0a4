use thiserror::Error;

/// Errors reported by the library.
///
/// Construction preconditions (odd party count, local dimensions at least 3,
/// nondecreasing order) each get their own variant so callers can tell a
/// rejected input apart from a malformed one.
#[derive(Debug, Error)]
pub enum Error {
    #[error("number of parties must be odd, got {0}")]
    EvenPartyCount(usize),
    #[error("need at least 3 parties, got {0}")]
    TooFewParties(usize),
    #[error("local dimension of party {party} must be at least 3, got {dim}")]
    DimTooSmall { party: usize, dim: u32 },
    #[error("local dimensions must be nondecreasing")]
    DimsNotSorted,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("set is not pairwise orthogonal ({violations} violating pairs)")]
    NotOrthogonal { violations: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
}
