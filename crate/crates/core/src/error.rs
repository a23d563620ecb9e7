use alloc::string::String;

/// Errors raised by the core kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::InvalidParameter(alloc::format!($($arg)*))
    };
}

macro_rules! malformed {
    ($($arg:tt)*) => {
        $crate::Error::Malformed(alloc::format!($($arg)*))
    };
}

pub(crate) use {invalid, malformed};
