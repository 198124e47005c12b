//! The per-submitter thread order under non-blocking operations.
//!
//! With non-blocking submissions a worker's history is no longer totally
//! ordered; three rule families induce the partial order that correctness is
//! judged against:
//!
//! 1. a blocking operation precedes every later operation of the worker;
//! 2. operations on the same monitor keep program order;
//! 3. an awaited operation precedes every operation the worker issued after
//!    the await returned (the await-return event is what "the result is
//!    required" means operationally).

use std::collections::BTreeSet;

use crate::model::{CallIdx, CallModel};

/// Strict partial order over one submitter's operations. Positions index the
/// submitter's calls in submission order; `ops[i]` maps back to the history.
#[derive(Clone, Debug)]
pub struct ThreadOrderRelation {
    pub submitter: u64,
    pub ops: Vec<CallIdx>,
    /// Direct edges by local position.
    direct: Vec<BTreeSet<usize>>,
    /// Transitive closure of `direct`.
    closure: Vec<BTreeSet<usize>>,
}

impl ThreadOrderRelation {
    /// True when operation at local position `i` must precede `j`.
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.closure[i].contains(&j)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// All ordered pairs (closure), as local positions.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.closure
            .iter()
            .enumerate()
            .flat_map(|(i, set)| set.iter().map(move |&j| (i, j)))
    }

    pub fn direct_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.direct
            .iter()
            .enumerate()
            .flat_map(|(i, set)| set.iter().map(move |&j| (i, j)))
    }

    /// Sanity: irreflexive and acyclic. Holds by construction (every edge
    /// points forward in submission order); exposed for property tests.
    pub fn is_strict_partial_order(&self) -> bool {
        self.closure
            .iter()
            .enumerate()
            .all(|(i, set)| !set.contains(&i) && set.iter().all(|&j| j > i))
    }
}

/// Builds the thread order of one submitter's operations.
pub fn build_thread_order(model: &CallModel, submitter: u64) -> ThreadOrderRelation {
    let ops: Vec<CallIdx> = model.submissions_of(submitter).to_vec();
    let n = ops.len();
    let mut direct: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];

    for i in 0..n {
        let call = model.call(ops[i]);
        // Family 1: blocking orders everything later.
        if call.blocking == Some(true) {
            for j in (i + 1)..n {
                direct[i].insert(j);
            }
        }
        // Family 2: same-monitor program order.
        for j in (i + 1)..n {
            if model.call(ops[j]).monitor == call.monitor {
                direct[i].insert(j);
            }
        }
        // Family 3: the awaited result is required before everything the
        // submitter did after the await returned.
        if let Some(await_ts) = call.await_ts {
            if let Some(k) = (i + 1..n).find(|&j| model.call(ops[j]).sub_ts > await_ts) {
                for j in k..n {
                    direct[i].insert(j);
                }
            }
        }
    }

    // Transitive closure; edges only point forward, so a reverse sweep
    // finishes in one pass.
    let mut closure = direct.clone();
    for i in (0..n).rev() {
        let succs: Vec<usize> = closure[i].iter().copied().collect();
        for j in succs {
            let reach: Vec<usize> = closure[j].iter().copied().collect();
            closure[i].extend(reach);
        }
    }

    ThreadOrderRelation {
        submitter,
        ops,
        direct,
        closure,
    }
}
