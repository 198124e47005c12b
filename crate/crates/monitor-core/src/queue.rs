//! Per-monitor task queues: one FIFO lane per submitter.
//!
//! Only lane heads are schedulable. Within a lane, tasks are kept in
//! per-submitter sequence order; a successor stage or a retried task re-enters
//! at the front (its sequence number is smaller than everything queued behind
//! it). Among executable heads the scheduler picks the smallest global
//! enqueue stamp, which keeps the choice starvation-free and deterministic.

use std::collections::{BTreeMap, VecDeque};

use crate::task::TaskInstance;
use crate::WorkerId;

/// Why a monitor stopped accepting submissions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CloseMode {
    Drain,
    Abort,
}

/// Lane table for one monitor. Guarded by the monitor's mutex.
pub(crate) struct MonitorQueues {
    lanes: BTreeMap<WorkerId, VecDeque<TaskInstance>>,
    /// Enqueued-but-incomplete non-blocking calls charged against the
    /// pending limit.
    pub pending_nb: usize,
    pub closed: Option<CloseMode>,
}

impl MonitorQueues {
    pub fn new() -> Self {
        MonitorQueues {
            lanes: BTreeMap::new(),
            pending_nb: 0,
            closed: None,
        }
    }

    pub fn push_back(&mut self, task: TaskInstance) {
        self.lanes.entry(task.submitter).or_default().push_back(task);
    }

    /// Re-enqueues a successor stage or retried task at its lane head.
    pub fn push_front(&mut self, task: TaskInstance) {
        let lane = self.lanes.entry(task.submitter).or_default();
        if let Some(head) = lane.front() {
            debug_assert!(
                task.seq < head.seq,
                "front push must preserve lane sequence order"
            );
        }
        lane.push_front(task);
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn is_empty(&self) -> bool {
        self.lanes.values().all(VecDeque::is_empty)
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn queued_tasks(&self) -> usize {
        self.lanes.values().map(VecDeque::len).sum()
    }

    /// Considers only the head of each lane, evaluates `executable` on those
    /// heads, and pops the executable head with the smallest enqueue stamp.
    /// Returns `None` when no head is executable. Never inspects non-head
    /// tasks: a later task of a submitter cannot overtake an unexecutable
    /// earlier one.
    pub fn schedule_next<F>(&mut self, executable: F) -> Option<TaskInstance>
    where
        F: Fn(&TaskInstance) -> bool,
    {
        let mut best: Option<(WorkerId, u64)> = None;
        for (&worker, lane) in &self.lanes {
            let Some(head) = lane.front() else { continue };
            if !executable(head) {
                continue;
            }
            match best {
                Some((_, stamp)) if stamp <= head.stamp => {}
                _ => best = Some((worker, head.stamp)),
            }
        }
        let (worker, _) = best?;
        let lane = self.lanes.get_mut(&worker).expect("winning lane exists");
        let task = lane.pop_front().expect("winning lane non-empty");
        if lane.is_empty() {
            self.lanes.remove(&worker);
        }
        Some(task)
    }

    /// Removes every queued task (shutdown paths).
    pub fn drain_all(&mut self) -> Vec<TaskInstance> {
        let mut out = Vec::new();
        for (_, mut lane) in std::mem::take(&mut self.lanes) {
            out.extend(lane.drain(..));
        }
        out
    }
}
