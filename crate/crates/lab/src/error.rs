use std::io;
use std::path::PathBuf;

use cburgers_core::checks::CheckError;
use cburgers_core::{SchemeError, SpectralError};
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: line {line}: {reason}")]
    Format {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("nothing to plot: every series is empty")]
    EmptyPlot,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scheme: {0}")]
    Scheme(#[from] SchemeError),
    #[error("spectral solver: {0}")]
    Spectral(#[from] SpectralError),
    #[error("check: {0}")]
    Check(#[from] CheckError),
    #[error("case {case}: {reason}")]
    Case { case: String, reason: String },
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }

    /// Usage errors exit with status 2, everything else with 1.
    pub fn is_usage(&self) -> bool {
        matches!(self, Self::Config(_))
    }
}
