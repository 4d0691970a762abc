use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("volume mismatch: {0}")]
    VolumeMismatch(String),

    #[error("boundary configuration does not cover the width-{range} shell (missing site {missing})")]
    ShellTooThin { range: usize, missing: String },

    #[error("state space of {configs} configurations exceeds the enumeration cap of {cap}")]
    StateSpaceTooLarge { configs: f64, cap: usize },

    #[error("value {value} is not in the alphabet {alphabet:?}")]
    NotInAlphabet { value: i8, alphabet: Vec<i8> },

    #[error("conditioning on an event of zero probability")]
    ZeroProbability,

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
