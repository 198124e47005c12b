//! Lock-based baseline implementations with the same semantics as the
//! monitor workloads: a coarse mutex plus condition variables per workload,
//! and a hand-over-hand fine-grained locked list for the list workload.

use std::sync::{Condvar, Mutex};

use parking_lot::lock_api::ArcMutexGuard;
use parking_lot::RawMutex;
use std::sync::Arc;

use crate::states::{BufferState, ListState, RRState, TicketState};

/// Coarse-lock bounded buffer (blocking put and take).
pub struct CoarseBuffer {
    state: Mutex<BufferState>,
    not_full: Condvar,
    not_empty: Condvar,
}

impl CoarseBuffer {
    pub fn new(size: usize) -> Self {
        CoarseBuffer {
            state: Mutex::new(BufferState::new(size)),
            not_full: Condvar::new(),
            not_empty: Condvar::new(),
        }
    }

    pub fn put(&self, v: i64) {
        let mut s = self.state.lock().expect("buffer lock poisoned");
        while s.item_count == s.size {
            s = self.not_full.wait(s).expect("buffer lock poisoned");
        }
        s.put(v);
        self.not_empty.notify_one();
    }

    pub fn take(&self) -> i64 {
        let mut s = self.state.lock().expect("buffer lock poisoned");
        while s.item_count == 0 {
            s = self.not_empty.wait(s).expect("buffer lock poisoned");
        }
        let v = s.take();
        self.not_full.notify_one();
        v
    }

    pub fn put_batch(&self, items: &[i64]) {
        let mut s = self.state.lock().expect("buffer lock poisoned");
        while !s.fits(items.len()) {
            s = self.not_full.wait(s).expect("buffer lock poisoned");
        }
        for &v in items {
            s.put(v);
        }
        self.not_empty.notify_all();
    }

    pub fn take_batch(&self, k: usize) -> Vec<i64> {
        let mut s = self.state.lock().expect("buffer lock poisoned");
        while s.item_count < k {
            s = self.not_empty.wait(s).expect("buffer lock poisoned");
        }
        let out = (0..k).map(|_| s.take()).collect();
        self.not_full.notify_all();
        out
    }

    pub fn snapshot(&self) -> Vec<i64> {
        self.state.lock().expect("buffer lock poisoned").fifo_contents()
    }
}

/// Coarse-lock sorted list (no condition synchronization).
pub struct CoarseList {
    state: Mutex<ListState>,
}

impl CoarseList {
    pub fn new(initial: Vec<i64>) -> Self {
        CoarseList {
            state: Mutex::new(ListState::from_values(initial)),
        }
    }

    pub fn insert(&self, v: i64) {
        self.state.lock().expect("list lock poisoned").insert(v);
    }

    pub fn remove(&self, v: i64) {
        self.state.lock().expect("list lock poisoned").remove(v);
    }

    pub fn snapshot(&self) -> Vec<i64> {
        self.state.lock().expect("list lock poisoned").to_vec()
    }
}

/// Coarse-lock round-robin gate.
pub struct CoarseRoundRobin {
    state: Mutex<RRState>,
    turn_changed: Condvar,
}

impl CoarseRoundRobin {
    pub fn new(n_threads: usize) -> Self {
        CoarseRoundRobin {
            state: Mutex::new(RRState::new(n_threads as i64)),
            turn_changed: Condvar::new(),
        }
    }

    pub fn enter(&self, my_id: i64) {
        self.enter_then(my_id, |_| ());
    }

    /// Enters the critical section and runs `f` inside it (after the turn
    /// update); lets tests observe the entry order without races.
    pub fn enter_then<R>(&self, my_id: i64, f: impl FnOnce(&RRState) -> R) -> R {
        let mut s = self.state.lock().expect("rr lock poisoned");
        while s.turn != my_id {
            s = self.turn_changed.wait(s).expect("rr lock poisoned");
        }
        s.turn = (s.turn + 1) % s.n_threads;
        let out = f(&s);
        self.turn_changed.notify_all();
        out
    }

    pub fn snapshot(&self) -> i64 {
        self.state.lock().expect("rr lock poisoned").turn
    }
}

/// Coarse-lock ticketed readers/writers.
pub struct CoarseTicketRw {
    state: Mutex<TicketState>,
    served: Condvar,
}

impl CoarseTicketRw {
    pub fn new() -> Self {
        CoarseTicketRw {
            state: Mutex::new(TicketState::default()),
            served: Condvar::new(),
        }
    }

    pub fn start_read(&self) {
        let mut s = self.state.lock().expect("rw lock poisoned");
        let my_ticket = s.ticket;
        s.ticket += 1;
        while s.serving != my_ticket {
            s = self.served.wait(s).expect("rw lock poisoned");
        }
        s.rcnt += 1;
        s.serving += 1;
        self.served.notify_all();
    }

    pub fn end_read(&self) {
        let mut s = self.state.lock().expect("rw lock poisoned");
        s.rcnt -= 1;
        self.served.notify_all();
    }

    pub fn start_write(&self) {
        let mut s = self.state.lock().expect("rw lock poisoned");
        let my_ticket = s.ticket;
        s.ticket += 1;
        while s.serving != my_ticket || s.rcnt != 0 {
            s = self.served.wait(s).expect("rw lock poisoned");
        }
    }

    pub fn end_write(&self) {
        let mut s = self.state.lock().expect("rw lock poisoned");
        s.serving += 1;
        self.served.notify_all();
    }

    pub fn snapshot(&self) -> Vec<i64> {
        let s = self.state.lock().expect("rw lock poisoned");
        vec![s.ticket, s.serving, s.rcnt]
    }
}

impl Default for CoarseTicketRw {
    fn default() -> Self {
        Self::new()
    }
}

// --- fine-grained list -------------------------------------------------------

type NodeMutex = parking_lot::Mutex<FgLink>;
type FgLink = Option<Arc<FgNode>>;
type OwnedGuard = ArcMutexGuard<RawMutex, FgLink>;

struct FgNode {
    value: i64,
    next: Arc<NodeMutex>,
}

/// Hand-over-hand (lock-coupling) sorted list: walkers hold at most two
/// node locks at a time, acquired head-to-tail.
pub struct FineGrainedList {
    head: Arc<NodeMutex>,
}

impl FineGrainedList {
    pub fn new(mut initial: Vec<i64>) -> Self {
        initial.sort_unstable();
        let mut link: FgLink = None;
        for v in initial.into_iter().rev() {
            link = Some(Arc::new(FgNode {
                value: v,
                next: Arc::new(parking_lot::Mutex::new(link)),
            }));
        }
        FineGrainedList {
            head: Arc::new(parking_lot::Mutex::new(link)),
        }
    }

    /// Walks until `prev` guards the first link whose node is >= v (or the
    /// tail), releasing each lock only after taking the next one.
    fn seek(&self, v: i64) -> OwnedGuard {
        let mut prev: OwnedGuard = self.head.lock_arc();
        loop {
            let step = match prev.as_ref() {
                Some(node) if node.value < v => Arc::clone(&node.next),
                _ => return prev,
            };
            let next = step.lock_arc();
            prev = next;
        }
    }

    pub fn insert(&self, v: i64) {
        let mut slot = self.seek(v);
        let tail = slot.take();
        *slot = Some(Arc::new(FgNode {
            value: v,
            next: Arc::new(parking_lot::Mutex::new(tail)),
        }));
    }

    pub fn remove(&self, v: i64) -> bool {
        let mut slot = self.seek(v);
        match slot.as_ref() {
            Some(node) if node.value == v => {
                let node = slot.take().expect("just matched Some");
                let succ = node.next.lock().take();
                *slot = succ;
                true
            }
            _ => false,
        }
    }

    /// Unsynchronized read; call only after all writers joined.
    pub fn snapshot(&self) -> Vec<i64> {
        let mut out = Vec::new();
        let mut cursor = self.head.lock().clone();
        while let Some(node) = cursor {
            out.push(node.value);
            cursor = node.next.lock().clone();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_buffer_blocks_and_flows() {
        let buf = Arc::new(CoarseBuffer::new(2));
        let b = Arc::clone(&buf);
        let producer = std::thread::spawn(move || {
            for i in 0..10 {
                b.put(i);
            }
        });
        let taken: Vec<i64> = (0..10).map(|_| buf.take()).collect();
        producer.join().unwrap();
        assert_eq!(taken, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn fine_grained_list_matches_coarse_single_threaded() {
        let fg = FineGrainedList::new(vec![4, 2, 8]);
        let coarse = CoarseList::new(vec![4, 2, 8]);
        for v in [3, 2, 9, 1] {
            fg.insert(v);
            coarse.insert(v);
        }
        for v in [4, 100, 2] {
            fg.remove(v);
            coarse.remove(v);
        }
        assert_eq!(fg.snapshot(), coarse.snapshot());
    }

    #[test]
    fn fine_grained_list_survives_concurrent_updates() {
        let list = Arc::new(FineGrainedList::new((0..100).collect()));
        let mut joins = Vec::new();
        for t in 0..4 {
            let list = Arc::clone(&list);
            joins.push(std::thread::spawn(move || {
                for i in 0..200 {
                    if i % 2 == 0 {
                        list.insert(t * 1000 + i);
                    } else {
                        list.remove(i % 100);
                    }
                }
            }));
        }
        for j in joins {
            j.join().unwrap();
        }
        let snap = list.snapshot();
        assert!(snap.windows(2).all(|w| w[0] <= w[1]), "list stays sorted");
    }
}
