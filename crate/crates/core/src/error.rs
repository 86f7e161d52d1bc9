use alloc::string::String;

/// Errors raised by the estimation pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported wavelet filter `{0}`")]
    UnsupportedFilter(String),
    #[error("AR polynomial has a root on or inside the unit circle")]
    NonStationary,
    #[error("exponential family parameters overflow (log-density reached {0:.1})")]
    DivergedParameters(f64),
    #[error("precondition violated: coefficient mismatch {0:.3e}")]
    CoefficientMismatch(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
