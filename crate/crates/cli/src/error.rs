use std::fmt;

use gdv_core::ErrorClass;
use gdv_nets::NetError;

#[derive(Debug)]
pub enum CliError {
    Core(gdv_core::Error),
    Net(NetError),
    Usage(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Net(e) => e.name(),
            CliError::Usage(_) => "UsageError",
        }
    }

    /// 0 success, 1 IO, 2 validation, 3 numeric divergence.
    pub fn exit_code(&self) -> i32 {
        let class = match self {
            CliError::Core(e) => e.class(),
            CliError::Net(NetError::Core(e)) => e.class(),
            CliError::Net(NetError::NonFiniteLoss { .. }) => ErrorClass::Numeric,
            CliError::Net(_) | CliError::Usage(_) => ErrorClass::Validation,
        };
        match class {
            ErrorClass::Io => 1,
            ErrorClass::Validation => 2,
            ErrorClass::Numeric => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Net(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "UsageError: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gdv_core::Error> for CliError {
    fn from(e: gdv_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        match e {
            NetError::Core(c) => CliError::Core(c),
            other => CliError::Net(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
