use mdlab::group::GroupError;
use mdlab::multiplier::MultiplierError;
use mdlab::schur::SchurError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("resource cap: {0}")]
    Resource(String),
    #[error("not converged: {0}")]
    NonConvergence(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Resource(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::BallTooLarge { .. } | GroupError::OutsideHorizon { .. } | GroupError::Overflow => {
                CliError::Resource(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SchurError> for CliError {
    fn from(e: SchurError) -> Self {
        match e {
            SchurError::Io(io) => CliError::Io(io),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<MultiplierError> for CliError {
    fn from(e: MultiplierError) -> Self {
        match e {
            MultiplierError::Group(g) => g.into(),
            MultiplierError::Schur(s) => s.into(),
            MultiplierError::Certificate(_) | MultiplierError::Representation(_) => {
                CliError::NonConvergence(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
