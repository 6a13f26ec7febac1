use std::fmt;

use holo_core::Error;

/// Command failure, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, values or config syntax (exit 1).
    Usage(String),
    /// Inputs that parse but violate geometry or data constraints (exit 2).
    Validation(String),
    /// Unreadable, unwritable or malformed files (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let file_problem = e.is_io()
            || matches!(
                e,
                Error::BadMagic(_)
                    | Error::UnsupportedVersion(_)
                    | Error::TruncatedPayload { .. }
                    | Error::BadSidecar(_)
                    | Error::BadManifest(_)
            );
        if file_problem {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
