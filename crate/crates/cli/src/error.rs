use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed config JSON: {0}")]
    MalformedJson(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("step {step} is not an integer multiple of grid spacing {grid_spacing}")]
    StepRatio { step: f64, grid_spacing: f64 },
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error(transparent)]
    Runtime(#[from] wtdyn::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status for this error. Clap reports its own usage errors with 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MalformedJson(_) => 3,
            CliError::InvalidConfig(_) => 4,
            CliError::StepRatio { .. } => 5,
            CliError::BadArgument(_) => 6,
            CliError::Runtime(_) => 7,
            CliError::Io { .. } => 8,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
