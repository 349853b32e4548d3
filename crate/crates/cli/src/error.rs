use golodlab::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    /// The spec file is malformed or refers to something that does not exist.
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Io(String),
    /// A requested window is larger than this build is willing to allocate.
    #[error("{0}")]
    CapLimit(String),
    /// A computation failed; `context` names the spec field or stage involved.
    #[error("{context}: {source}")]
    Core { context: String, source: Error },
    /// A theorem check came out violated on a concrete instance.
    #[error("theorem violated: {0}")]
    Violated(String),
}

impl CliError {
    pub fn core(context: impl Into<String>) -> impl FnOnce(Error) -> CliError {
        let context = context.into();
        move |source| CliError::Core { context, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) | CliError::Io(_) => 2,
            CliError::CapLimit(_) => 3,
            CliError::Violated(_) => 4,
            CliError::Core { source, .. } => match source {
                Error::CapTooSmall(_) | Error::BeyondCap { .. } | Error::Overflow(_) => 3,
                Error::Internal(_) => 4,
                _ => 2,
            },
        }
    }
}
