//! Task derivation: a validated method call becomes a chain of runnable
//! tasks, one per stage, sharing a scratch object and the bound arguments.
//!
//! Only the first task of a chain is enqueued at submission; the executor
//! enqueues each successor when its predecessor's body finishes. Sequence
//! numbers for the whole chain are reserved up front from the submitter's
//! counter, so a later submission by the same worker always carries a larger
//! `seq` than every stage of this call.

use std::sync::Arc;

use crate::handle::HandleCore;
use crate::spec::{MethodSpec, Stage};
use crate::value::{Scratch, Value};
use crate::{MonitorId, WorkerId};

/// A runnable unit: one stage of one call, bound to its arguments and
/// submitter identity.
pub(crate) struct TaskInstance {
    pub call_id: u64,
    pub monitor: MonitorId,
    pub submitter: WorkerId,
    /// Per-submitter sequence number of this stage.
    pub seq: u64,
    /// Global enqueue stamp used for the oldest-executable-head tie-break.
    pub stamp: u64,
    pub stage_idx: usize,
    /// Body executions of the current stage (for retry policies).
    pub attempts: u32,
    pub method: Arc<MethodSpec>,
    pub args: Arc<[Value]>,
    pub scratch: Scratch,
    pub handle: Arc<HandleCore>,
    /// Whether this chain holds a slot of the monitor's pending-limit budget.
    pub counted: bool,
}

impl TaskInstance {
    pub fn stage(&self) -> &Stage {
        &self.method.stages()[self.stage_idx]
    }

    pub fn is_final_stage(&self) -> bool {
        self.stage_idx + 1 == self.method.stage_count()
    }

    /// Consumes this task and produces the successor-stage task, carrying the
    /// scratch object forward. `stamp` is the successor's enqueue stamp.
    pub fn advance(self, stamp: u64) -> TaskInstance {
        debug_assert!(!self.is_final_stage());
        TaskInstance {
            seq: self.seq + 1,
            stamp,
            stage_idx: self.stage_idx + 1,
            attempts: 0,
            ..self
        }
    }
}

/// Inspectable description of the tasks a method call derives into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskPlan {
    pub stage_idx: usize,
    /// Offset added to the submitter's sequence counter for this stage.
    pub seq_offset: u64,
    pub tautology: bool,
    pub barrier: bool,
}

/// Describes the task chain a call to `method` generates: one task per
/// stage, in stage order.
pub fn plan_tasks(method: &MethodSpec) -> Vec<TaskPlan> {
    method
        .stages()
        .iter()
        .enumerate()
        .map(|(i, s)| TaskPlan {
            stage_idx: i,
            seq_offset: i as u64,
            tautology: s.precondition().is_tautology(),
            barrier: s.is_barrier(),
        })
        .collect()
}
