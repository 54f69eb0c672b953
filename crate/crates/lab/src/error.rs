use thiserror::Error;

/// Failure of a CLI verb, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("run diverged at t = {time} (step {step})")]
    Diverged { step: u64, time: f64 },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("snapshot error: {0}")]
    Snapshot(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Usage(_) | LabError::Snapshot(_) => 2,
            LabError::Diverged { .. } => 3,
            LabError::Verification(_) => 4,
            LabError::Io(_) | LabError::Json(_) => 1,
        }
    }
}
