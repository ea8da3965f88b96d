use std::path::{Path, PathBuf};

/// Failure of a pipeline command.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad input data, configuration or arguments.
    #[error("{0}")]
    Input(String),
    /// An input file could not be read.
    #[error("cannot read {path}: {source}")]
    Read {
        /// File path.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// An output file could not be written.
    #[error("cannot write {path}: {source}")]
    Write {
        /// File path.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// Anything else.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Result alias for this crate.
pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    /// Process exit code: 1 for input problems, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Input(_) | AppError::Read { .. } => 1,
            AppError::Write { .. } | AppError::Internal(_) => 2,
        }
    }

    pub(crate) fn read(path: &Path, source: std::io::Error) -> Self {
        AppError::Read { path: path.to_path_buf(), source }
    }

    pub(crate) fn write(path: &Path, source: std::io::Error) -> Self {
        AppError::Write { path: path.to_path_buf(), source }
    }

    /// Input error prefixed with a file path.
    pub fn input(path: &Path, msg: impl std::fmt::Display) -> Self {
        AppError::Input(format!("{}: {msg}", path.display()))
    }
}

pub(crate) fn read_to_string(path: &Path) -> AppResult<String> {
    std::fs::read_to_string(path).map_err(|e| AppError::read(path, e))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> AppResult<()> {
    std::fs::write(path, contents).map_err(|e| AppError::write(path, e))
}
