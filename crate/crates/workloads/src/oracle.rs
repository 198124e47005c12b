//! Replay oracles: verify recorded runs against the sequential models.
//!
//! The completed calls of a history, ordered by their completing exec-end,
//! are replayed through the workload's sequential model; every return value
//! must match. That one judgment carries the per-workload invariants:
//! buffer conservation and FIFO order, list sortedness (via the final
//! snapshot), strict cyclic entry order, and ticket order with writer
//! exclusion. Drained buffers are additionally checked to be empty.

use std::collections::HashMap;

use history_checker::seqspec::{
    BatchBufferModel, BufferModel, ListModel, SequentialSpec, TicketModel, TurnModel,
};
use history_checker::CallModel;
use monitor_core::history::EventKind;
use monitor_core::{History, Value};

use crate::driver::{Workload, WorkloadConfig};
use crate::streams::prepopulated_list_values;

/// A failed oracle check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleViolation(pub String);

impl std::fmt::Display for OracleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "oracle violation: {}", self.0)
    }
}

impl std::error::Error for OracleViolation {}

fn model_for(cfg: &WorkloadConfig) -> Box<dyn SequentialSpec> {
    match cfg.workload {
        Workload::BoundedBuffer => Box::new(BufferModel::new(cfg.buffer_size)),
        Workload::ParamBuffer => Box::new(BatchBufferModel::new(cfg.buffer_size)),
        Workload::SortedList => Box::new(ListModel::with_items(prepopulated_list_values(
            cfg.seed,
            cfg.list_prepopulate,
        ))),
        Workload::RoundRobin => Box::new(TurnModel::new(cfg.threads as i64)),
        Workload::TicketedRw => Box::new(TicketModel::new()),
    }
}

/// Replays a recorded monitor run against the workload's sequential model.
pub fn check_history(cfg: &WorkloadConfig, history: &History) -> Result<(), OracleViolation> {
    let model = CallModel::build(history)
        .map_err(|e| OracleViolation(format!("malformed history: {e}")))?;
    let mut state = model_for(cfg);
    for &idx in &model.completion_order() {
        let call = model.call(idx);
        let args = call.args.as_deref().unwrap_or(&[]);
        let got = state
            .apply(&call.method, args)
            .map_err(|e| OracleViolation(format!("call {} ({}): {e}", call.call_id, call.method)))?;
        if let Some(expected) = &call.ret {
            if *expected != got {
                return Err(OracleViolation(format!(
                    "call {} ({}): returned {expected}, model yields {got}",
                    call.call_id, call.method
                )));
            }
        }
    }
    if let Some(unfinished) = model.incomplete_calls().first() {
        return Err(OracleViolation(format!(
            "call {} never completed",
            model.call(*unfinished).call_id
        )));
    }
    check_drained(cfg, history)?;
    if cfg.workload == Workload::TicketedRw {
        check_arrival_order(history)?;
    }
    Ok(())
}

/// After a balanced run the buffers must have drained: the final snapshot
/// call returned the empty list.
fn check_drained(cfg: &WorkloadConfig, history: &History) -> Result<(), OracleViolation> {
    if !matches!(cfg.workload, Workload::BoundedBuffer | Workload::ParamBuffer) {
        return Ok(());
    }
    let final_ret = history
        .iter()
        .filter(|e| e.kind == EventKind::ExecEnd && &*e.method == "snapshot")
        .filter_map(|e| e.ret.clone())
        .next_back();
    match final_ret {
        Some(Value::List(items)) if items.is_empty() => Ok(()),
        Some(other) => Err(OracleViolation(format!(
            "buffer not drained: snapshot = {other}"
        ))),
        None => Ok(()), // run recorded without a snapshot call
    }
}

/// Service happens in arrival order: per start call, the second stage's
/// completion order must equal the first stage's (ticket-take) order.
fn check_arrival_order(history: &History) -> Result<(), OracleViolation> {
    let mut stage0 = Vec::new();
    let mut stage1 = Vec::new();
    for e in history {
        if e.kind == EventKind::ExecEnd && (&*e.method == "startRead" || &*e.method == "startWrite")
        {
            match e.stage {
                0 => stage0.push(e.task_id),
                1 => stage1.push(e.task_id),
                _ => {}
            }
        }
    }
    if stage0 != stage1 {
        return Err(OracleViolation(
            "service order differs from ticket-take order".into(),
        ));
    }
    Ok(())
}

/// Conservation for a lock-based buffer run: the multiset of taken values
/// equals the multiset of produced values and the buffer drained.
pub fn check_baseline_conservation(
    produced: &[i64],
    taken: &[i64],
    final_snapshot: &Value,
) -> Result<(), OracleViolation> {
    fn multiset(values: &[i64]) -> HashMap<i64, usize> {
        let mut m = HashMap::new();
        for &v in values {
            *m.entry(v).or_insert(0) += 1;
        }
        m
    }
    if multiset(produced) != multiset(taken) {
        return Err(OracleViolation(
            "taken values are not the produced values".into(),
        ));
    }
    match final_snapshot {
        Value::List(items) if items.is_empty() => Ok(()),
        other => Err(OracleViolation(format!("buffer not drained: {other}"))),
    }
}
