use std::fmt;
use std::process::ExitCode;

use spectral_trace_core::traces::StageFailure;

/// Everything a command can fail with, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// Bad command line or manifest. Exit 1.
    #[error("invalid configuration: {0}")]
    Validation(String),
    /// A numerical stage failed. Exit 2, stage named on stderr.
    #[error("stage {stage} failed: {message}")]
    Stage { stage: String, message: String },
    /// The run finished but a `--check` bound was violated. Exit 3.
    #[error("check failed: {0}")]
    Check(String),
}

impl LabError {
    pub fn stage(stage: &str, err: impl fmt::Display) -> Self {
        LabError::Stage { stage: stage.to_string(), message: err.to_string() }
    }

    pub fn output(err: impl fmt::Display) -> Self {
        LabError::stage("output", err)
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            LabError::Validation(_) => 1,
            LabError::Stage { .. } => 2,
            LabError::Check(_) => 3,
        })
    }
}

impl From<StageFailure> for LabError {
    fn from(f: StageFailure) -> Self {
        LabError::Stage { stage: f.stage.name().to_string(), message: f.error.to_string() }
    }
}
