use thiserror::Error;

use crate::units::UnitError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const SELFCHECK_FAILED: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{key}`: {source}")]
    Unit {
        key: &'static str,
        source: UnitError,
    },

    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },

    #[error("config file: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] magnus_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("selfcheck failed: {0}")]
    SelfcheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use magnus_core::Error as E;
        match self {
            CliError::SelfcheckFailed(_) => exit::SELFCHECK_FAILED,
            CliError::Core(E::InvalidParameter { .. } | E::Untrapped) => exit::VALIDATION,
            CliError::Core(_) => exit::NUMERICAL,
            CliError::Unit { .. }
            | CliError::Invalid { .. }
            | CliError::Config(_)
            | CliError::Io { .. } => exit::VALIDATION,
        }
    }
}
