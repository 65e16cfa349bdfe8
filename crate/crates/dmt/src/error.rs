use thiserror::Error;

/// Process exit status of the `dmt` binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitCode {
    Success = 0,
    InvalidInput = 2,
    NumericalFailure = 3,
    IoFailure = 4,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::InvalidInput,
            CliError::Numerical(_) => ExitCode::NumericalFailure,
            CliError::Io(_) => ExitCode::IoFailure,
        }
    }
}

impl From<dmt_core::Error> for CliError {
    fn from(e: dmt_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}
