use std::path::PathBuf;

/// Top-level failure, split by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad user input: missing files, malformed CSV headers, invalid
    /// parameters. Exit code 2.
    #[error("{0:#}")]
    BadInput(anyhow::Error),
    /// Anything else. Exit code 1.
    #[error("{0:#}")]
    Internal(anyhow::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::BadInput(_) => 2,
            AppError::Internal(_) => 1,
        }
    }

    pub fn bad_input(err: impl Into<anyhow::Error>) -> Self {
        AppError::BadInput(err.into())
    }

    pub fn missing_file(path: &std::path::Path) -> Self {
        AppError::BadInput(anyhow::anyhow!("input file not found: {}", path.display()))
    }

    pub fn with_context(self, ctx: impl std::fmt::Display + Send + Sync + 'static) -> Self {
        match self {
            AppError::BadInput(e) => AppError::BadInput(e.context(ctx)),
            AppError::Internal(e) => AppError::Internal(e.context(ctx)),
        }
    }
}

impl From<airconf_core::Error> for AppError {
    fn from(err: airconf_core::Error) -> Self {
        use airconf_core::Error as E;
        match err {
            E::InvalidArgument(_)
            | E::UnknownAirport(_)
            | E::DuplicateAirport(_)
            | E::MissingStats(_)
            | E::ShapeMismatch { .. } => AppError::BadInput(err.into()),
            _ => AppError::Internal(err.into()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(err: std::io::Error) -> Self {
        AppError::Internal(err.into())
    }
}

impl From<serde_json::Error> for AppError {
    fn from(err: serde_json::Error) -> Self {
        AppError::Internal(err.into())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("flight CSV is missing required column {column:?}")]
    MissingColumn { column: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid registry: {0}")]
    Registry(String),
}

impl From<IngestError> for AppError {
    fn from(err: IngestError) -> Self {
        AppError::BadInput(err.into())
    }
}
