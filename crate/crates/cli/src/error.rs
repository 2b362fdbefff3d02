use std::fmt;
use std::io;
use std::path::Path;

use tbids_core::codec::DecodeError;

/// Failure of one invocation, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Signature or handshake did not verify.
    Invalid(String),
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) => 1,
            Self::Validation(_) => 2,
            Self::Io(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Invalid(_) => "invalid",
            Self::Validation(_) => "validation",
            Self::Io(_) => "io",
        }
    }

    fn detail(&self) -> &str {
        match self {
            Self::Invalid(d) | Self::Validation(d) | Self::Io(d) => d,
        }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        Self::Io(format!("{}: {err}", path.display()))
    }

    pub fn decode(path: &Path, err: DecodeError) -> Self {
        Self::Validation(format!("{}: {err}", path.display()))
    }
}

/// One line on stderr: `error=<kind> code=<n> detail="<text>"`.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error={} code={} detail={:?}", self.kind(), self.exit_code(), self.detail())
    }
}

impl From<tbids_core::Error> for CliError {
    fn from(e: tbids_core::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
