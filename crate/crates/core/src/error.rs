use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: shape, range or permutation violations.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// No feasible solution exists under the given constraints.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The requested method does not apply to this input.
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    /// An enumeration guard was hit; `required` is the size that would be needed.
    #[error("{what} exceeds cap: required {required}, cap {cap}")]
    CapExceeded {
        what: String,
        required: u64,
        cap: u64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
