use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("oracle comparison failed: {0}")]
    OracleMismatch(String),
    #[error("numerical failure: {0}")]
    Numeric(#[from] adlab::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => 2,
            Self::OracleMismatch(_) => 3,
            Self::Numeric(_) => 4,
        }
    }
}
