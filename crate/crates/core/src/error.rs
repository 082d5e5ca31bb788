use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("pole: {0}")]
    Pole(String),

    /// A requested coefficient lies outside the window in which it is known.
    #[error("insufficient precision: {what} (need window >= {needed}, have {have})")]
    Precision {
        what: String,
        needed: i64,
        have: i64,
    },

    #[error("logarithmic term: antiderivative of a series with nonzero residue")]
    LogTerm,

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("valuation violation: {0}")]
    Valuation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn precision(what: impl Into<String>, needed: i64, have: i64) -> Self {
        Error::Precision {
            what: what.into(),
            needed,
            have,
        }
    }

    /// True for errors that a larger series window could resolve.
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Precision { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
