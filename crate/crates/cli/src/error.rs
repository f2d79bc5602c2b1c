use std::fmt;
use std::process::ExitCode;

use npc_core::Error as CoreError;

/// A failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or physically inconsistent configuration.
    Config(String),
    /// The configured problem has no phase-matching solution.
    NoSolution(String),
    /// A numeric routine failed.
    Numeric(String),
    /// Reading or writing files.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::NoSolution(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io(_) => 1,
        })
    }

    /// Attaches the config section a core error came from.
    pub fn in_section(section: &str) -> impl Fn(CoreError) -> CliError + '_ {
        move |e| match e {
            CoreError::NoSolution(_) | CoreError::EmptyFeasibleInterval(_) => {
                CliError::NoSolution(format!("[{section}] {e}"))
            }
            CoreError::Numeric(_) => CliError::Numeric(format!("[{section}] {e}")),
            _ => CliError::Config(format!("[{section}] {e}")),
        }
    }

    pub fn io(context: impl fmt::Display) -> impl Fn(std::io::Error) -> CliError {
        move |e| CliError::Io(format!("{context}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::NoSolution(m) => write!(f, "no solution: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
