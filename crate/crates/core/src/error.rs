use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RmcError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("initialization failed: {0}")]
    Initialization(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, RmcError>;
