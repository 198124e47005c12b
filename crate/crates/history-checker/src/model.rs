//! Call-level view of an event history.
//!
//! Events are grouped by `task_id` into calls; a multi-stage call contributes
//! one submit event, and per stage one or more exec-start/exec-end attempt
//! pairs. The model indexes everything the rule checks and the
//! linearizability checker need: submission order per submitter, completing
//! execution instants, await points and (for in-memory histories) argument
//! and return values.

use std::collections::BTreeMap;
use std::sync::Arc;

use monitor_core::history::{EventKind, History};
use monitor_core::Value;
use thiserror::Error;

/// Index into `CallModel::calls`.
pub type CallIdx = usize;

/// One exec attempt of one stage: paired start/end event offsets.
#[derive(Clone, Debug)]
pub struct Attempt {
    pub exs_idx: usize,
    pub exe_idx: Option<usize>,
}

/// Execution record of one stage of a call.
#[derive(Clone, Debug, Default)]
pub struct StageExec {
    pub attempts: Vec<Attempt>,
}

impl StageExec {
    /// Exec-start of the attempt that settled the stage (the last one).
    pub fn completing_exs(&self) -> Option<usize> {
        self.attempts.last().map(|a| a.exs_idx)
    }

    pub fn completing_exe(&self) -> Option<usize> {
        self.attempts.last().and_then(|a| a.exe_idx)
    }
}

/// One method call reconstructed from the history.
#[derive(Clone, Debug)]
pub struct CallRecord {
    pub call_id: u64,
    pub monitor: u32,
    pub submitter: u64,
    pub method: Arc<str>,
    /// Submission kind when known (in-memory histories).
    pub blocking: Option<bool>,
    pub args: Option<Arc<[Value]>>,
    /// Value carried by the completing exec-end (in-memory histories).
    pub ret: Option<Value>,
    pub seq_base: u64,
    pub sub_ts: u64,
    pub sub_idx: usize,
    /// Per-stage execution records, indexed by stage.
    pub stages: Vec<StageExec>,
    /// First await-return by the submitter, if any.
    pub await_ts: Option<u64>,
    /// Offset and timestamp of the last exec-end observed for this call.
    pub last_exe_idx: Option<usize>,
    pub last_exe_ts: Option<u64>,
    /// True when the call's chain finished: its completing exec-end carried a
    /// return value (in-memory histories), or — for structural histories —
    /// every observed stage closed cleanly.
    pub completed: bool,
}

impl CallRecord {
    /// Timestamp of the call's completing exec-end (its linearization point).
    pub fn completion_ts(&self) -> Option<u64> {
        if self.completed {
            self.last_exe_ts
        } else {
            None
        }
    }

    /// Event offset of the completing exec-end.
    pub fn completion_idx(&self) -> Option<usize> {
        if self.completed {
            self.last_exe_idx
        } else {
            None
        }
    }
}

/// Structural defects that make a history unusable for checking.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MalformedHistory {
    #[error("event {event}: duplicate submit for task {task_id}")]
    DuplicateSubmit { event: usize, task_id: u64 },
    #[error("event {event}: {kind:?} for task {task_id} with no preceding submit")]
    OrphanEvent {
        event: usize,
        kind: EventKind,
        task_id: u64,
    },
    #[error("event {event}: exec-end without an open exec-start (task {task_id}, stage {stage})")]
    EndWithoutStart {
        event: usize,
        task_id: u64,
        stage: u32,
    },
    #[error("event {event}: exec-start while a previous attempt of task {task_id} stage {stage} is still open")]
    NestedAttempt {
        event: usize,
        task_id: u64,
        stage: u32,
    },
    #[error("task {task_id}: submit timestamp not before first exec-start")]
    SubmitAfterExec { task_id: u64 },
}

/// The parsed, indexed history.
#[derive(Clone, Debug)]
pub struct CallModel {
    calls: Vec<CallRecord>,
    by_submitter: BTreeMap<u64, Vec<CallIdx>>,
    monitors: Vec<u32>,
    event_count: usize,
}

impl CallModel {
    /// Groups events into calls and validates basic structure.
    pub fn build(history: &History) -> Result<Self, MalformedHistory> {
        let mut calls: Vec<CallRecord> = Vec::new();
        let mut by_task: BTreeMap<u64, CallIdx> = BTreeMap::new();

        for (idx, e) in history.iter().enumerate() {
            match e.kind {
                EventKind::Submit => {
                    if by_task.contains_key(&e.task_id) {
                        return Err(MalformedHistory::DuplicateSubmit {
                            event: idx,
                            task_id: e.task_id,
                        });
                    }
                    by_task.insert(e.task_id, calls.len());
                    calls.push(CallRecord {
                        call_id: e.task_id,
                        monitor: e.monitor,
                        submitter: e.thread_id,
                        method: Arc::clone(&e.method),
                        blocking: e.blocking,
                        args: e.args.clone(),
                        ret: None,
                        seq_base: e.seq,
                        sub_ts: e.ts,
                        sub_idx: idx,
                        stages: Vec::new(),
                        await_ts: None,
                        last_exe_idx: None,
                        last_exe_ts: None,
                        completed: false,
                    });
                }
                EventKind::ExecStart => {
                    let call = lookup(&mut calls, &by_task, idx, e.kind, e.task_id)?;
                    let stage = e.stage as usize;
                    if call.stages.len() <= stage {
                        call.stages.resize_with(stage + 1, StageExec::default);
                    }
                    let st = &mut call.stages[stage];
                    if st.attempts.last().is_some_and(|a| a.exe_idx.is_none()) {
                        return Err(MalformedHistory::NestedAttempt {
                            event: idx,
                            task_id: e.task_id,
                            stage: e.stage,
                        });
                    }
                    st.attempts.push(Attempt {
                        exs_idx: idx,
                        exe_idx: None,
                    });
                }
                EventKind::ExecEnd => {
                    let call = lookup(&mut calls, &by_task, idx, e.kind, e.task_id)?;
                    let stage = e.stage as usize;
                    let open = call
                        .stages
                        .get_mut(stage)
                        .and_then(|s| s.attempts.last_mut())
                        .filter(|a| a.exe_idx.is_none());
                    let Some(attempt) = open else {
                        return Err(MalformedHistory::EndWithoutStart {
                            event: idx,
                            task_id: e.task_id,
                            stage: e.stage,
                        });
                    };
                    attempt.exe_idx = Some(idx);
                    call.last_exe_idx = Some(idx);
                    call.last_exe_ts = Some(e.ts);
                    if let Some(v) = &e.ret {
                        call.ret = Some(v.clone());
                        call.completed = true;
                    }
                }
                EventKind::AwaitReturn => {
                    let call = lookup(&mut calls, &by_task, idx, e.kind, e.task_id)?;
                    if call.await_ts.is_none() {
                        call.await_ts = Some(e.ts);
                    }
                }
            }
        }

        // In-memory histories mark completion via the return value on the
        // completing exec-end; a call whose chain failed has exec events but
        // no value. Parsed dumps carry no values at all, so for those fall
        // back to structural completion: every observed stage closed cleanly.
        let value_bearing = history.iter().any(|e| e.args.is_some() || e.ret.is_some());
        if !value_bearing {
            for call in &mut calls {
                call.completed = !call.stages.is_empty()
                    && call
                        .stages
                        .iter()
                        .all(|s| !s.attempts.is_empty() && s.completing_exe().is_some());
            }
        }

        for call in &calls {
            if let Some(first_exs) = call
                .stages
                .first()
                .and_then(|s| s.attempts.first())
                .map(|a| a.exs_idx)
            {
                let exs_ts = history.events()[first_exs].ts;
                if call.sub_ts >= exs_ts {
                    return Err(MalformedHistory::SubmitAfterExec {
                        task_id: call.call_id,
                    });
                }
            }
        }

        let mut by_submitter: BTreeMap<u64, Vec<CallIdx>> = BTreeMap::new();
        let mut order: Vec<CallIdx> = (0..calls.len()).collect();
        order.sort_by_key(|&i| calls[i].sub_ts);
        for i in order {
            by_submitter.entry(calls[i].submitter).or_default().push(i);
        }
        let mut monitors: Vec<u32> = calls.iter().map(|c| c.monitor).collect();
        monitors.sort_unstable();
        monitors.dedup();

        Ok(CallModel {
            calls,
            by_submitter,
            monitors,
            event_count: history.len(),
        })
    }

    pub fn calls(&self) -> &[CallRecord] {
        &self.calls
    }

    pub fn call(&self, idx: CallIdx) -> &CallRecord {
        &self.calls[idx]
    }

    pub fn submitters(&self) -> impl Iterator<Item = u64> + '_ {
        self.by_submitter.keys().copied()
    }

    /// Calls of one submitter in submission order.
    pub fn submissions_of(&self, submitter: u64) -> &[CallIdx] {
        self.by_submitter
            .get(&submitter)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn monitors(&self) -> &[u32] {
        &self.monitors
    }

    pub fn event_count(&self) -> usize {
        self.event_count
    }

    /// Completed calls ordered by their completing exec-end timestamp.
    pub fn completion_order(&self) -> Vec<CallIdx> {
        let mut done: Vec<CallIdx> = (0..self.calls.len())
            .filter(|&i| self.calls[i].completed)
            .collect();
        done.sort_by_key(|&i| self.calls[i].last_exe_ts.unwrap_or(u64::MAX));
        done
    }

    /// Calls that never completed (stranded, aborted or failed), which the
    /// linearizability checker excludes from the witness and flags.
    pub fn incomplete_calls(&self) -> Vec<CallIdx> {
        (0..self.calls.len())
            .filter(|&i| !self.calls[i].completed)
            .collect()
    }
}

fn lookup<'c>(
    calls: &'c mut [CallRecord],
    by_task: &BTreeMap<u64, CallIdx>,
    event: usize,
    kind: EventKind,
    task_id: u64,
) -> Result<&'c mut CallRecord, MalformedHistory> {
    match by_task.get(&task_id) {
        Some(&ci) => Ok(&mut calls[ci]),
        None => Err(MalformedHistory::OrphanEvent {
            event,
            kind,
            task_id,
        }),
    }
}
