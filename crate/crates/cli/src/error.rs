use thiserror::Error;
use uamo_core::LabError;

/// Process exit status. The numeric values are part of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    GateFailure = 1,
    Usage = 2,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            // numeric breakdowns of a well-posed run
            CliError::Lab(LabError::EigensolverFailure(_))
            | CliError::Lab(LabError::TooManySingular { .. })
            | CliError::Lab(LabError::NearSingularRho { .. }) => Exit::GateFailure,
            _ => Exit::Usage,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
