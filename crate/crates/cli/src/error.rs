use std::path::PathBuf;

use grover_dephasing::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("cannot write `{}`: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for configuration errors, 3 for resource caps, 4 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 4,
            CliError::Core(e) => match e {
                CoreError::ResourceCap { .. } => 3,
                CoreError::NoConvergence { .. } | CoreError::NoLimit | CoreError::Unusable(_) => 4,
                _ => 2,
            },
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
