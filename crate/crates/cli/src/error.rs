use std::path::PathBuf;
use thiserror::Error;

/// Everything a command can fail with, mapped onto the exit-code contract:
/// bad invocations exit 64, runtime failures exit 1 (validation-boolean
/// failures exit 2 but are not errors; see [`crate::run`]).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] domainwall::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A data file failed to parse; `line` is 1-based.
    #[error("{}:{line}: {message}", path.display())]
    MalformedFile {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: expected header {expected:?}, found {found:?}", path.display())]
    SchemaMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("json encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 64 for anything the caller got wrong on the command line, 1 for
    /// failures of the run itself. Core parameter/mesh rejections count as
    /// usage errors: in this crate they can only arise from flag values.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Model(domainwall::Error::InvalidParameter(_))
            | CliError::Model(domainwall::Error::InvalidMesh(_)) => 64,
            _ => 1,
        }
    }
}
