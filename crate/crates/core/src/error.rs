use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A state or matrix failed physicality checks.
    #[error("unphysical state: {0}")]
    Unphysical(String),

    /// Caller-supplied parameters outside the operation's domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested closed form does not cover this input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A trajectory or function has no regime crossing where one was required.
    #[error("no regime transition: {0}")]
    NoTransition(String),

    /// A numerical procedure produced an out-of-range or non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by bad caller input rather than internal failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
