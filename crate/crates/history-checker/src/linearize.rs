//! Linearizability checking under the task-submission reading of invocation
//! and response.
//!
//! Fast path: order completed calls by their completing exec-end (the
//! linearization point), then verify that this sequence replays legally
//! against the sequential specs and extends every submitter's thread order.
//! Oracle path: exhaustively enumerate the linear extensions of the union of
//! thread orders and accept if any replays legally. The two paths must agree
//! on small histories; the oracle exists to cross-check the fast path.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{CallIdx, CallModel};
use crate::order::build_thread_order;
use crate::seqspec::SequentialSpec;

/// Oracle cutoff: beyond this many operations the exhaustive search is
/// refused rather than silently skipped.
pub const ORACLE_MAX_OPS: usize = 10;

/// Provides a fresh sequential model per monitor.
pub trait SpecSource {
    fn model_for(&self, monitor: u32) -> Option<Box<dyn SequentialSpec>>;
}

impl<F> SpecSource for F
where
    F: Fn(u32) -> Option<Box<dyn SequentialSpec>>,
{
    fn model_for(&self, monitor: u32) -> Option<Box<dyn SequentialSpec>> {
        self(monitor)
    }
}

/// Why a candidate order is not a valid linearization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinViolation {
    /// The candidate order contradicts a submitter's thread order.
    OrderViolation { earlier: CallIdx, later: CallIdx },
    /// Replay failed at this call (guard false or return-value mismatch).
    IllegalAt { op: CallIdx, reason: String },
    /// No linear extension of the thread orders replays legally.
    NoLegalExtension,
}

/// Result of one path (fast or oracle).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinOutcome {
    /// A legal sequence, as call indices in linearization order.
    Witness(Vec<CallIdx>),
    Violation(LinViolation),
}

impl LinOutcome {
    pub fn passes(&self) -> bool {
        matches!(self, LinOutcome::Witness(_))
    }
}

/// Combined report of the two paths.
#[derive(Clone, Debug)]
pub struct LinReport {
    pub fast: LinOutcome,
    /// Present when the oracle was requested.
    pub oracle: Option<LinOutcome>,
    /// Calls excluded from the witness because they never completed.
    pub excluded: Vec<CallIdx>,
}

impl LinReport {
    pub fn fast_passes(&self) -> bool {
        self.fast.passes()
    }

    pub fn oracle_passes(&self) -> Option<bool> {
        self.oracle.as_ref().map(LinOutcome::passes)
    }

    /// Whether the two paths reached the same verdict.
    pub fn verdicts_agree(&self) -> Option<bool> {
        self.oracle_passes().map(|o| o == self.fast_passes())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("history has {ops} operations; the exhaustive oracle is limited to {max}")]
    OracleTooLarge { ops: usize, max: usize },
    #[error("call {call_id} carries no argument values; linearizability needs an in-memory history")]
    MissingArgs { call_id: u64 },
    #[error("no sequential model registered for monitor {monitor}")]
    UnknownMonitor { monitor: u32 },
}

struct LinProblem {
    /// Completed calls in completing-exec-end order.
    ops: Vec<CallIdx>,
    /// Direct predecessor constraints by op position (union of thread orders).
    preds: Vec<Vec<usize>>,
}

fn build_problem(model: &CallModel) -> LinProblem {
    let ops = model.completion_order();
    let pos_of: BTreeMap<CallIdx, usize> = ops.iter().enumerate().map(|(p, &c)| (c, p)).collect();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); ops.len()];
    for submitter in model.submitters() {
        let relation = build_thread_order(model, submitter);
        for (i, j) in relation.direct_edges() {
            let (a, b) = (relation.ops[i], relation.ops[j]);
            // Edges touching excluded (incomplete) calls are dropped; those
            // calls are flagged separately.
            if let (Some(&pa), Some(&pb)) = (pos_of.get(&a), pos_of.get(&b)) {
                preds[pb].push(pa);
            }
        }
    }
    for p in &mut preds {
        p.sort_unstable();
        p.dedup();
    }
    LinProblem { ops, preds }
}

fn fresh_states(
    model: &CallModel,
    specs: &dyn SpecSource,
) -> Result<BTreeMap<u32, Box<dyn SequentialSpec>>, CheckError> {
    model
        .monitors()
        .iter()
        .map(|&mid| {
            specs
                .model_for(mid)
                .map(|s| (mid, s))
                .ok_or(CheckError::UnknownMonitor { monitor: mid })
        })
        .collect()
}

fn apply_op(
    model: &CallModel,
    states: &mut BTreeMap<u32, Box<dyn SequentialSpec>>,
    call: CallIdx,
) -> Result<(), String> {
    let record = model.call(call);
    let args = record.args.as_deref().unwrap_or(&[]);
    let state = states
        .get_mut(&record.monitor)
        .expect("state prepared for every monitor");
    match state.apply(&record.method, args) {
        Err(illegal) => Err(illegal.reason),
        Ok(value) => match &record.ret {
            Some(expected) if *expected != value => Err(format!(
                "return mismatch: history has {expected}, sequential spec yields {value}"
            )),
            _ => Ok(()),
        },
    }
}

fn check_sequence(
    model: &CallModel,
    problem: &LinProblem,
    specs: &dyn SpecSource,
) -> Result<LinOutcome, CheckError> {
    // The candidate is the ops vector itself (completion order), so the
    // order constraints reduce to: every predecessor position is smaller.
    for (later_pos, preds) in problem.preds.iter().enumerate() {
        for &earlier_pos in preds {
            if earlier_pos >= later_pos {
                return Ok(LinOutcome::Violation(LinViolation::OrderViolation {
                    earlier: problem.ops[later_pos],
                    later: problem.ops[earlier_pos],
                }));
            }
        }
    }
    let mut states = fresh_states(model, specs)?;
    for &call in &problem.ops {
        if let Err(reason) = apply_op(model, &mut states, call) {
            return Ok(LinOutcome::Violation(LinViolation::IllegalAt {
                op: call,
                reason,
            }));
        }
    }
    Ok(LinOutcome::Witness(problem.ops.clone()))
}

fn oracle_search(
    model: &CallModel,
    problem: &LinProblem,
    specs: &dyn SpecSource,
) -> Result<LinOutcome, CheckError> {
    let n = problem.ops.len();
    let mut consumed = vec![false; n];
    let mut prefix: Vec<usize> = Vec::with_capacity(n);
    let states = fresh_states(model, specs)?;

    fn dfs(
        model: &CallModel,
        problem: &LinProblem,
        consumed: &mut [bool],
        prefix: &mut Vec<usize>,
        states: &BTreeMap<u32, Box<dyn SequentialSpec>>,
    ) -> Option<Vec<usize>> {
        let n = problem.ops.len();
        if prefix.len() == n {
            return Some(prefix.clone());
        }
        for cand in 0..n {
            if consumed[cand] {
                continue;
            }
            if problem.preds[cand].iter().any(|&p| !consumed[p]) {
                continue;
            }
            let call = problem.ops[cand];
            let mut next_states: BTreeMap<u32, Box<dyn SequentialSpec>> = states
                .iter()
                .map(|(k, v)| (*k, v.boxed_clone()))
                .collect();
            if apply_op(model, &mut next_states, call).is_ok() {
                consumed[cand] = true;
                prefix.push(cand);
                if let Some(found) = dfs(model, problem, consumed, prefix, &next_states) {
                    return Some(found);
                }
                prefix.pop();
                consumed[cand] = false;
            }
        }
        None
    }

    match dfs(model, problem, &mut consumed, &mut prefix, &states) {
        Some(positions) => Ok(LinOutcome::Witness(
            positions.into_iter().map(|p| problem.ops[p]).collect(),
        )),
        None => Ok(LinOutcome::Violation(LinViolation::NoLegalExtension)),
    }
}

/// Checks linearizability of the history against per-monitor sequential
/// specs. With `oracle` set, also runs the exhaustive linear-extension
/// search (histories of more than [`ORACLE_MAX_OPS`] completed operations
/// are refused).
pub fn check_linearizable(
    model: &CallModel,
    specs: &dyn SpecSource,
    oracle: bool,
) -> Result<LinReport, CheckError> {
    let problem = build_problem(model);
    for &call in &problem.ops {
        if model.call(call).args.is_none() {
            return Err(CheckError::MissingArgs {
                call_id: model.call(call).call_id,
            });
        }
    }
    if oracle && problem.ops.len() > ORACLE_MAX_OPS {
        return Err(CheckError::OracleTooLarge {
            ops: problem.ops.len(),
            max: ORACLE_MAX_OPS,
        });
    }
    let fast = check_sequence(model, &problem, specs)?;
    let oracle_outcome = if oracle {
        Some(oracle_search(model, &problem, specs)?)
    } else {
        None
    };
    Ok(LinReport {
        fast,
        oracle: oracle_outcome,
        excluded: model.incomplete_calls(),
    })
}

/// Replays a witness and checks it against every submitter's thread order;
/// used to validate that returned witnesses are sound.
pub fn verify_witness(
    model: &CallModel,
    witness: &[CallIdx],
    specs: &dyn SpecSource,
) -> Result<bool, CheckError> {
    let pos_of: BTreeMap<CallIdx, usize> =
        witness.iter().enumerate().map(|(p, &c)| (c, p)).collect();
    for submitter in model.submitters() {
        let relation = build_thread_order(model, submitter);
        for (i, j) in relation.pairs() {
            let (a, b) = (relation.ops[i], relation.ops[j]);
            if let (Some(&pa), Some(&pb)) = (pos_of.get(&a), pos_of.get(&b)) {
                if pa >= pb {
                    return Ok(false);
                }
            }
        }
    }
    let mut states = fresh_states(model, specs)?;
    for &call in witness {
        if apply_op(model, &mut states, call).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}
