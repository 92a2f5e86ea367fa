use std::path::PathBuf;

use thiserror::Error;
use truncstat_core::estimator::EstimatorError;
use truncstat_core::inference::InferenceError;
use truncstat_core::model::ModelError;
use truncstat_core::pseudo::PseudoError;
use truncstat_core::sample::SampleError;
use truncstat_core::score::ScoreSpecError;

/// Failures while reading an `x,y` data file. Row numbers count data rows
/// from 1, so the first line after the header is row 1.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("expected header `x,y`, found `{0}`")]
    BadHeader(String),
    #[error("row {row}: column {column} is not a finite number")]
    BadNumber { row: usize, column: String },
    #[error("cannot read input: {0}")]
    Read(String),
    #[error(transparent)]
    Sample(SampleError),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("bad score function: {0}")]
    BadPhi(String),
    #[error(transparent)]
    BadPhiTable(#[from] ScoreSpecError),
    #[error("{0}")]
    MissingArgument(&'static str),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Pseudo(#[from] PseudoError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl Error {
    /// Module-qualified error code, e.g. `sample_model.TruncationViolated`.
    pub fn code(&self) -> String {
        let (module, name) = match self {
            Error::Input(InputError::Sample(e)) | Error::Sample(e) => ("sample_model", e.code()),
            Error::Input(e) => (
                "cli_io",
                match e {
                    InputError::FileNotFound(_) => "FileNotFound",
                    InputError::BadHeader(_) => "BadHeader",
                    InputError::BadNumber { .. } => "BadNumber",
                    InputError::Read(_) => "ReadFailed",
                    InputError::Sample(_) => unreachable!(),
                },
            ),
            Error::Config(e) => (
                "cli_io",
                match e {
                    ConfigError::BadPhi(_) | ConfigError::BadPhiTable(_) => "BadPhi",
                    ConfigError::MissingArgument(_) => "MissingArgument",
                    ConfigError::InvalidArgument(_) => "InvalidArgument",
                    ConfigError::Usage(_) => "Usage",
                },
            ),
            Error::Estimator(e) => ("estimator", e.code()),
            Error::Pseudo(e) => ("estimator", e.code()),
            Error::Inference(e) => ("inference", e.code()),
            Error::Model(e) => ("simulation", e.code()),
            Error::Output(_) => ("cli_io", "WriteFailed"),
        };
        format!("{module}.{name}")
    }

    /// Single-line rendering used on stderr.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error[{}]: {}", self.code(), msg)
    }
}
