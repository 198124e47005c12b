//! Error types for the runtime surface.

use thiserror::Error;

/// Why a submitted call ultimately failed.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TaskFailure {
    /// A stage body returned an error (or panicked) and the exception policy
    /// gave up after `attempts` executions.
    #[error("task body failed after {attempts} attempt(s): {message}")]
    Body { message: String, attempts: u32 },
    /// The runtime was aborted while the call was still pending.
    #[error("runtime shut down before the task completed")]
    Shutdown,
    /// A drain shutdown found the task's precondition permanently false.
    #[error("task stranded at shutdown: precondition never became true")]
    Stranded,
}

/// Errors surfaced by method validation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("method `{method}` declares no stages")]
    EmptyMethod { method: String },
    #[error("method `{method}` declares a blocking call back into its own monitor")]
    RecursiveBlocking { method: String },
}

/// Errors from `MonitorRuntime::start`.
#[derive(Debug, Error)]
pub enum StartError {
    #[error("invalid runtime configuration: {0}")]
    InvalidConfig(String),
    #[error("monitor `{monitor}`: {source}")]
    Spec {
        monitor: String,
        #[source]
        source: ValidationError,
    },
    #[error("monitor `{monitor}` declares method `{method}` more than once")]
    DuplicateMethod { monitor: String, method: String },
    #[error("monitor name `{0}` declared more than once")]
    DuplicateMonitor(String),
    #[error("failed to spawn executor thread")]
    SpawnFailure(#[source] std::io::Error),
}

/// Errors from the submission path.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubmitError {
    #[error("runtime is shut down or shutting down")]
    RuntimeShutDown,
    #[error("unknown monitor id {0}")]
    MonitorUnknown(u32),
    #[error("monitor `{monitor}` has no method `{method}`")]
    MethodUnknown { monitor: String, method: String },
    /// A blocking submission propagates the failure of its task chain.
    #[error(transparent)]
    Task(TaskFailure),
}

/// Errors from awaiting a completion handle.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AwaitError {
    #[error("timed out waiting for task completion")]
    Timeout,
    #[error(transparent)]
    Task(TaskFailure),
}

/// Errors from `MonitorRuntime::shutdown`.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ShutdownError {
    /// Drain finished with tasks whose preconditions never became true.
    /// Carries the call ids of the stranded tasks.
    #[error("drain left {} stranded task(s)", .0.len())]
    Stranded(Vec<u64>),
}

/// Errors from parsing runtime configuration files or environment overrides.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);
