//! Failure classes and their process exit codes.

use std::fmt;

use riskrank::crossval::CvError;
use riskrank::ranking::RankError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input, configuration or parameters.
    Input(String),
    /// Non-finite values during an iteration.
    Numeric(String),
}

impl CliError {
    pub fn input(e: impl fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CvError> for CliError {
    fn from(e: CvError) -> Self {
        match &e {
            CvError::Rank { source: RankError::NumericFailure { .. }, .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Result of a command that ran to the end. Non-empty `partial` means some
/// iterative run did not converge; outputs are written but the exit code is 3.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub partial: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.partial.is_empty() {
            EXIT_OK
        } else {
            EXIT_PARTIAL
        }
    }

    pub fn merge(&mut self, other: Outcome) {
        self.partial.extend(other.partial);
    }
}
