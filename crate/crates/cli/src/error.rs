use ghostsim_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    /// 1: invariant violation, 2: configuration, 3: regime or resolution.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                CoreError::Regime(_)
                | CoreError::Resolution(_)
                | CoreError::Escaped(_)
                | CoreError::Extraction(_) => 3,
                _ => 2,
            },
        }
    }
}
