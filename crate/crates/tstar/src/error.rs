use thiserror::Error;

/// Library-wide error type.
///
/// `Input` means the caller handed us something malformed (shape mismatch,
/// unknown generator, wrong degree). `Violation` means the data was well
/// formed but an exact identity failed; the message pinpoints the first
/// failing block or the counterexample.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("violation: {0}")]
    Violation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub fn violation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Violation(msg.into()))
}
