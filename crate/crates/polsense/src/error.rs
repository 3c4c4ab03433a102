use std::path::{Path, PathBuf};

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OTHER: u8 = 1;
    /// Command-line usage errors (reported by the argument parser).
    pub const USAGE: u8 = 2;
    pub const CONFIG: u8 = 3;
    pub const IO: u8 = 4;
    pub const DETECTION_MISMATCH: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] polsense_core::Error),

    #[error("detected {detected_deg}° but the ground truth is {truth_deg}°")]
    DetectionMismatch { detected_deg: f64, truth_deg: f64 },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, line: usize, message: impl Into<String>) -> Self {
        CliError::Format {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Io { .. } | CliError::Format { .. } => exit::IO,
            CliError::DetectionMismatch { .. } => exit::DETECTION_MISMATCH,
            CliError::Input(_) => exit::USAGE,
            CliError::Core(_) => exit::OTHER,
        }
    }
}
