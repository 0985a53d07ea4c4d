use std::fmt;

use popclust::Error;

/// A failed command and the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments.
    Config(String),
    /// Unreadable or unusable input.
    Input(String),
    /// The motif enumeration budget ran out.
    Budget(String),
    /// Malformed data in strict mode.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Data(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Budget(m) => write!(f, "{m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::BudgetExceeded { .. } | Error::ItemBudgetExceeded { .. } => CliError::Budget(msg),
            Error::Record { .. } | Error::MissingTimestamp { .. } | Error::MissingColumn(_) | Error::Csv(_) => {
                CliError::Data(msg)
            }
            Error::InvalidParameter(_) => CliError::Config(msg),
            _ => CliError::Input(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
