use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed group-spec string.
    #[error("invalid group spec {input:?}: {reason}")]
    GroupSyntax { input: String, reason: String },

    /// Operands drawn from different groups.
    #[error("group mismatch: {0}")]
    SpecMismatch(String),

    /// Structurally invalid input (bad vertex, unreduced residue, malformed file...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A size or node budget was exceeded before the computation could finish.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// The labelling was proven zero-sum-free, so no witness exists.
    #[error("zero-sum-free: {0}")]
    ZeroSumFree(String),

    /// The constructive route stalled and no exhaustive fallback was possible.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// An internal consistency check failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
