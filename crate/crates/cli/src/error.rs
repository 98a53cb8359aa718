use std::process::ExitCode;

use poisson_rigidity::field::FieldError;
use poisson_rigidity::lie::LieError;
use poisson_rigidity::rates::RateError;
use poisson_rigidity::witness::WitnessError;
use thiserror::Error;

/// Operational failures. A failed mathematical check is not an error: the
/// run completes, writes its artifacts and exits with status 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Precondition(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("missing file: {0}")]
    MissingFile(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) | CliError::Precondition(_) => 2,
            CliError::MissingFile(_) | CliError::Io(_) => 3,
        }
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Io(m) => CliError::Io(m),
            FieldError::Parse(m) => CliError::Usage(m),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<WitnessError> for CliError {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::Field(f) => f.into(),
            WitnessError::InvalidConfig(m) => CliError::Usage(m),
            e @ (WitnessError::BoundViolated { .. } | WitnessError::ResidualNotDecaying { .. }) => {
                CliError::Check(e.to_string())
            }
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<RateError> for CliError {
    fn from(e: RateError) -> Self {
        match e {
            RateError::Field(f) => f.into(),
            RateError::InvalidEpsilon(_) | RateError::InvalidOptions(_) => CliError::Usage(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<LieError> for CliError {
    fn from(e: LieError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
