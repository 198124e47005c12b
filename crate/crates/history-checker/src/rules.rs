//! The three ordering-rule checks and the lock-equivalence consequence.
//!
//! Rule 1: all executions of one monitor happen on a single executor thread
//! and never overlap. Rule 2: per (monitor, submitter), tasks start executing
//! in sequence order. Rule 3 (strict mode): a submitter's consecutive
//! submissions on different monitors serialize — the earlier call completes
//! before the later one is submitted. Lock equivalence asserts the
//! consequence of all three: per submitter, global completion order equals
//! full submission order.

use std::collections::BTreeMap;

use monitor_core::history::{EventKind, History};

use crate::model::CallModel;

/// Outcome of one rule check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleOutcome {
    pub pass: bool,
    /// Offsets of a witnessing event pair when the rule is violated.
    pub violation: Option<(usize, usize)>,
    pub detail: String,
}

impl RuleOutcome {
    fn pass() -> Self {
        RuleOutcome {
            pass: true,
            violation: None,
            detail: String::new(),
        }
    }

    fn fail(first: usize, second: usize, detail: String) -> Self {
        RuleOutcome {
            pass: false,
            violation: Some((first, second)),
            detail,
        }
    }
}

/// Rule 1: per monitor, every exec event carries the same executor thread id
/// and exec intervals never overlap.
pub fn check_rule1(history: &History) -> RuleOutcome {
    let mut executor_of: BTreeMap<u32, (u64, usize)> = BTreeMap::new();
    // Currently open exec-start per monitor (events are in timestamp order).
    let mut open: BTreeMap<u32, usize> = BTreeMap::new();

    for (idx, e) in history.iter().enumerate() {
        match e.kind {
            EventKind::ExecStart => {
                match executor_of.get(&e.monitor) {
                    None => {
                        executor_of.insert(e.monitor, (e.thread_id, idx));
                    }
                    Some(&(tid, first_idx)) if tid != e.thread_id => {
                        return RuleOutcome::fail(
                            first_idx,
                            idx,
                            format!(
                                "monitor {} executed by threads {} and {}",
                                e.monitor, tid, e.thread_id
                            ),
                        );
                    }
                    Some(_) => {}
                }
                if let Some(&prev) = open.get(&e.monitor) {
                    return RuleOutcome::fail(
                        prev,
                        idx,
                        format!("monitor {}: overlapping executions", e.monitor),
                    );
                }
                open.insert(e.monitor, idx);
            }
            EventKind::ExecEnd => {
                open.remove(&e.monitor);
            }
            _ => {}
        }
    }
    RuleOutcome::pass()
}

/// Rule 2: for each (monitor, submitter), the completing exec-starts are
/// ordered by the tasks' sequence numbers.
pub fn check_rule2(model: &CallModel) -> RuleOutcome {
    // (monitor, submitter) -> [(completing exec-start offset, seq)]
    let mut groups: BTreeMap<(u32, u64), Vec<(usize, u64)>> = BTreeMap::new();
    for call in model.calls() {
        for (stage_idx, stage) in call.stages.iter().enumerate() {
            if let Some(exs_idx) = stage.completing_exs() {
                groups
                    .entry((call.monitor, call.submitter))
                    .or_default()
                    .push((exs_idx, call.seq_base + stage_idx as u64));
            }
        }
    }
    for ((monitor, submitter), mut starts) in groups {
        starts.sort_by_key(|&(idx, _)| idx);
        for pair in starts.windows(2) {
            let (first_idx, first_seq) = pair[0];
            let (second_idx, second_seq) = pair[1];
            if first_seq > second_seq {
                return RuleOutcome::fail(
                    first_idx,
                    second_idx,
                    format!(
                        "monitor {monitor}, submitter {submitter}: seq {first_seq} started before seq {second_seq}"
                    ),
                );
            }
        }
    }
    RuleOutcome::pass()
}

/// Rule 3 (strict mode): for each submitter's consecutive submissions on
/// different monitors, the earlier call's completing exec-end precedes the
/// later call's submit.
pub fn check_rule3(model: &CallModel) -> RuleOutcome {
    for submitter in model.submitters() {
        let subs = model.submissions_of(submitter);
        for pair in subs.windows(2) {
            let first = model.call(pair[0]);
            let second = model.call(pair[1]);
            if first.monitor == second.monitor {
                continue;
            }
            let completed_in_time = first
                .completion_ts()
                .is_some_and(|end| end < second.sub_ts);
            if !completed_in_time {
                return RuleOutcome::fail(
                    first.completion_idx().unwrap_or(first.sub_idx),
                    second.sub_idx,
                    format!(
                        "submitter {submitter}: call {} on monitor {} not completed before call {} on monitor {}",
                        first.call_id, first.monitor, second.call_id, second.monitor
                    ),
                );
            }
        }
    }
    RuleOutcome::pass()
}

/// Lock equivalence: the global completing-exec-end sequence, projected to
/// each submitter, equals that submitter's full submission order.
pub fn check_lock_equivalence(model: &CallModel) -> RuleOutcome {
    let completion = model.completion_order();
    let mut completed_by_submitter: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for idx in completion {
        completed_by_submitter
            .entry(model.call(idx).submitter)
            .or_default()
            .push(idx);
    }
    for submitter in model.submitters() {
        let submitted = model.submissions_of(submitter);
        let empty = Vec::new();
        let completed = completed_by_submitter.get(&submitter).unwrap_or(&empty);
        if submitted.len() != completed.len() {
            let first = submitted
                .iter()
                .find(|&&c| !model.call(c).completed)
                .copied()
                .unwrap_or(0);
            return RuleOutcome::fail(
                model.call(first).sub_idx,
                model.call(first).sub_idx,
                format!(
                    "submitter {submitter}: {} submissions but {} completions",
                    submitted.len(),
                    completed.len()
                ),
            );
        }
        for (pos, (&sub, &done)) in submitted.iter().zip(completed.iter()).enumerate() {
            if sub != done {
                return RuleOutcome::fail(
                    model.call(sub).sub_idx,
                    model.call(done).completion_idx().unwrap_or(0),
                    format!(
                        "submitter {submitter}: position {pos} submitted call {} but completed call {}",
                        model.call(sub).call_id,
                        model.call(done).call_id
                    ),
                );
            }
        }
    }
    RuleOutcome::pass()
}
