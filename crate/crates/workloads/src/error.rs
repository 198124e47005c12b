//! Workload-level errors.

use monitor_core::{ShutdownError, StartError, SubmitError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("workload config error: {0}")]
    Config(String),
    #[error(transparent)]
    Start(#[from] StartError),
    #[error("submission failed: {0}")]
    Submit(#[from] SubmitError),
    #[error(transparent)]
    Shutdown(#[from] ShutdownError),
}
