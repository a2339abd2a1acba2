use std::fmt;
use std::process::ExitCode;

/// Failure of a subcommand, carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// `--assert` tolerances or replay digests did not hold.
    Assertion(String),
    /// Unreadable, malformed or invalid input.
    Input(String),
    /// A configured computation budget was exceeded.
    Budget(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Assertion(_) => 1,
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        })
    }

    /// Wraps a library error with the file or stage it came from.
    pub fn core(context: impl fmt::Display, e: imp_core::Error) -> Self {
        let msg = format!("{context}: {e}");
        if e.is_budget() {
            CliError::Budget(msg)
        } else {
            CliError::Input(msg)
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Assertion(m) => write!(f, "assertion failed: {m}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Budget(m) => write!(f, "budget exceeded: {m}"),
        }
    }
}
