use std::fmt;

use mobpred_core::dataset::DatasetError;
use mobpred_core::eval::EvalError;
use mobpred_core::svm::SvmError;
use mobpred_core::traffic_sim::ConfigError;

/// Process exit codes shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Io = 1,
    Usage = 2,
    Data = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Usage,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self {
            kind: ExitKind::Io,
            message: format!("{}: {err}", path.display()),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Data,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<SvmError> for CliError {
    fn from(e: SvmError) -> Self {
        match e {
            SvmError::InvalidConfig(_) => CliError::usage(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io(io) => CliError {
                kind: ExitKind::Io,
                message: io.to_string(),
            },
            other => CliError::data(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Dataset(d) => d.into(),
            EvalError::Svm(s) => s.into(),
            EvalError::EmptyTest => CliError::data(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
