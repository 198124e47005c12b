//! Active-monitor runtime.
//!
//! A monitor is served by a dedicated executor thread instead of being
//! entered by its callers: worker threads submit *tasks* (guarded units
//! derived from monitor methods) and either wait for the result (blocking
//! submission) or continue immediately with a completion handle
//! (non-blocking submission). The executor re-evaluates task preconditions
//! after every state change, so condition synchronization needs no explicit
//! signaling.
//!
//! The runtime enforces three ordering rules, checkable post-mortem from the
//! recorded history:
//!
//! 1. all tasks of one monitor execute on the same executor thread, and
//!    their executions never overlap;
//! 2. tasks from one submitter execute in submission order;
//! 3. (strict mode) a worker's consecutive submissions on *different*
//!    monitors serialize: the earlier task completes before the later call
//!    is submitted.
//!
//! Rules 1–3 make executions equivalent to lock-based ones; rules 1–2 alone
//! still give linearizability when invocation is read as task submission and
//! response as task completion.

pub mod config;
pub mod error;
pub mod handle;
pub mod history;
pub mod queue;
pub mod runtime;
pub mod spec;
pub mod task;
pub mod value;

pub use config::{ExceptionPolicy, HookDecision, OrderingMode, RuntimeConfig, TaskErrorContext};
pub use error::{
    AwaitError, ConfigError, ShutdownError, StartError, SubmitError, TaskFailure, ValidationError,
};
pub use handle::{CompletionHandle, HandleStatus};
pub use history::{DumpParseError, EventKind, History, HistoryEvent};
pub use runtime::{
    MonitorRuntime, RuntimeStats, ShutdownMode, Submitted, WorkerSession, EXECUTOR_ID_BASE,
};
pub use spec::{
    validate_method, BodyError, BodyResult, MethodKind, MethodSpec, MonitorSpec, Precondition,
    Stage, ValidationReport,
};
pub use task::{plan_tasks, TaskPlan};
pub use value::{Scratch, Value};

/// Identifies a monitor within one runtime (assignment order of the specs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonitorId(pub u32);

/// Logical identity of a submitting worker thread. Each concurrent submitter
/// must use a distinct id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorkerId(pub u64);

impl std::fmt::Display for MonitorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "m{}", self.0)
    }
}

impl std::fmt::Display for WorkerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "w{}", self.0)
    }
}
