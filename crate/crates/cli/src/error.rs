use std::fmt;

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad or unreadable configuration; exit code 2.
    Config(String),
    /// Failure while executing a valid configuration; exit code 3.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Tags errors from configuration loading and validation.
pub trait ConfigContext<T> {
    fn config(self) -> CliResult<T>;
}

/// Tags errors from execution.
pub trait RuntimeContext<T> {
    fn runtime(self) -> CliResult<T>;
}

impl<T, E: fmt::Display> ConfigContext<T> for Result<T, E> {
    fn config(self) -> CliResult<T> {
        self.map_err(|e| CliError::Config(e.to_string()))
    }
}

impl<T, E: fmt::Display> RuntimeContext<T> for Result<T, E> {
    fn runtime(self) -> CliResult<T> {
        self.map_err(|e| CliError::Runtime(e.to_string()))
    }
}
