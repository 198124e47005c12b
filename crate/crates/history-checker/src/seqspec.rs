//! Sequential specifications: the abstract models that define which
//! operation sequences are legal.
//!
//! An operation is applied atomically to the abstract state. A guarded
//! method whose precondition is false in the current abstract state is
//! illegal at that position; that is how `waituntil` semantics enter the
//! legality judgment.

use std::collections::VecDeque;
use std::fmt;

use monitor_core::Value;

/// Applying an operation at a position where it could not have run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IllegalOp {
    pub reason: String,
}

impl IllegalOp {
    fn new(reason: impl Into<String>) -> Self {
        IllegalOp {
            reason: reason.into(),
        }
    }
}

impl fmt::Display for IllegalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "illegal operation: {}", self.reason)
    }
}

/// A deterministic abstract state with an `apply` transition.
pub trait SequentialSpec: Send {
    /// Applies `method(args)`; returns the value the operation must yield.
    fn apply(&mut self, method: &str, args: &[Value]) -> Result<Value, IllegalOp>;

    /// Clones the current state (the brute-force checker backtracks).
    fn boxed_clone(&self) -> Box<dyn SequentialSpec>;
}

impl Clone for Box<dyn SequentialSpec> {
    fn clone(&self) -> Self {
        self.boxed_clone()
    }
}

/// FIFO bounded buffer: `put(v)` requires space, `take` requires an item and
/// returns the oldest one.
#[derive(Clone, Debug)]
pub struct BufferModel {
    pub size: usize,
    pub items: VecDeque<i64>,
}

impl BufferModel {
    pub fn new(size: usize) -> Self {
        BufferModel {
            size,
            items: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

impl SequentialSpec for BufferModel {
    fn apply(&mut self, method: &str, args: &[Value]) -> Result<Value, IllegalOp> {
        match method {
            "put" => {
                if self.items.len() >= self.size {
                    return Err(IllegalOp::new("put on full buffer"));
                }
                let v = args
                    .first()
                    .and_then(Value::as_int)
                    .ok_or_else(|| IllegalOp::new("put expects an int"))?;
                self.items.push_back(v);
                Ok(Value::Unit)
            }
            "take" => match self.items.pop_front() {
                Some(v) => Ok(Value::Int(v)),
                None => Err(IllegalOp::new("take on empty buffer")),
            },
            "snapshot" => Ok(Value::List(self.items.iter().copied().collect())),
            other => Err(IllegalOp::new(format!("unknown buffer method `{other}`"))),
        }
    }

    fn boxed_clone(&self) -> Box<dyn SequentialSpec> {
        Box::new(self.clone())
    }
}

/// Bounded buffer with batched puts and takes. A batch is all-or-nothing:
/// `put_batch` requires space for the whole collection, `take_batch(k)`
/// requires `k` items and returns them in FIFO order.
#[derive(Clone, Debug)]
pub struct BatchBufferModel {
    pub size: usize,
    pub items: VecDeque<i64>,
}

impl BatchBufferModel {
    pub fn new(size: usize) -> Self {
        BatchBufferModel {
            size,
            items: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }
}

impl SequentialSpec for BatchBufferModel {
    fn apply(&mut self, method: &str, args: &[Value]) -> Result<Value, IllegalOp> {
        match method {
            "put_batch" => {
                let batch = args
                    .first()
                    .and_then(Value::as_list)
                    .ok_or_else(|| IllegalOp::new("put_batch expects a list"))?;
                if self.items.len() + batch.len() > self.size {
                    return Err(IllegalOp::new("put_batch exceeds capacity"));
                }
                self.items.extend(batch.iter().copied());
                Ok(Value::Unit)
            }
            "take_batch" => {
                let k = args
                    .first()
                    .and_then(Value::as_int)
                    .ok_or_else(|| IllegalOp::new("take_batch expects a count"))? as usize;
                if self.items.len() < k {
                    return Err(IllegalOp::new("take_batch short of items"));
                }
                Ok(Value::List(self.items.drain(..k).collect()))
            }
            "snapshot" => Ok(Value::List(self.items.iter().copied().collect())),
            other => Err(IllegalOp::new(format!(
                "unknown batch buffer method `{other}`"
            ))),
        }
    }

    fn boxed_clone(&self) -> Box<dyn SequentialSpec> {
        Box::new(self.clone())
    }
}

/// Sorted integer list with multiset semantics: duplicate inserts keep both
/// copies, removing an absent value is a successful no-op.
#[derive(Clone, Debug, Default)]
pub struct ListModel {
    pub items: Vec<i64>,
}

impl ListModel {
    pub fn new() -> Self {
        ListModel::default()
    }

    pub fn with_items(mut items: Vec<i64>) -> Self {
        items.sort_unstable();
        ListModel { items }
    }

    pub fn is_sorted(&self) -> bool {
        self.items.windows(2).all(|w| w[0] <= w[1])
    }
}

impl SequentialSpec for ListModel {
    fn apply(&mut self, method: &str, args: &[Value]) -> Result<Value, IllegalOp> {
        let value = || {
            args.first()
                .and_then(Value::as_int)
                .ok_or_else(|| IllegalOp::new("list op expects an int"))
        };
        match method {
            "insert" => {
                let v = value()?;
                let pos = self.items.partition_point(|&x| x < v);
                self.items.insert(pos, v);
                Ok(Value::Unit)
            }
            "remove" => {
                let v = value()?;
                if let Ok(pos) = self.items.binary_search(&v) {
                    self.items.remove(pos);
                }
                Ok(Value::Unit)
            }
            "snapshot" => Ok(Value::List(self.items.clone())),
            other => Err(IllegalOp::new(format!("unknown list method `{other}`"))),
        }
    }

    fn boxed_clone(&self) -> Box<dyn SequentialSpec> {
        Box::new(self.clone())
    }
}

/// Cyclic turn counter: `enter(id)` is legal only when it is `id`'s turn and
/// passes the turn to the next thread.
#[derive(Clone, Debug)]
pub struct TurnModel {
    pub n_threads: i64,
    pub turn: i64,
}

impl TurnModel {
    pub fn new(n_threads: i64) -> Self {
        TurnModel { n_threads, turn: 0 }
    }
}

impl SequentialSpec for TurnModel {
    fn apply(&mut self, method: &str, args: &[Value]) -> Result<Value, IllegalOp> {
        match method {
            "enter" => {
                let id = args
                    .first()
                    .and_then(Value::as_int)
                    .ok_or_else(|| IllegalOp::new("enter expects an id"))?;
                if id != self.turn {
                    return Err(IllegalOp::new(format!(
                        "enter({id}) out of turn (turn={})",
                        self.turn
                    )));
                }
                self.turn = (self.turn + 1) % self.n_threads;
                Ok(Value::Unit)
            }
            "snapshot" => Ok(Value::Int(self.turn)),
            other => Err(IllegalOp::new(format!("unknown turn method `{other}`"))),
        }
    }

    fn boxed_clone(&self) -> Box<dyn SequentialSpec> {
        Box::new(self.clone())
    }
}

/// Ticketed readers/writers. Atomically, `startRead`/`startWrite` take the
/// next ticket and are legal only when that ticket is being served (and, for
/// writers, no readers are active); the writer holds the service window until
/// `endWrite`.
#[derive(Clone, Debug, Default)]
pub struct TicketModel {
    pub ticket: i64,
    pub serving: i64,
    pub rcnt: i64,
    pub writing: bool,
}

impl TicketModel {
    pub fn new() -> Self {
        TicketModel::default()
    }
}

impl SequentialSpec for TicketModel {
    fn apply(&mut self, method: &str, _args: &[Value]) -> Result<Value, IllegalOp> {
        match method {
            "startRead" => {
                if self.serving != self.ticket {
                    return Err(IllegalOp::new("startRead while an arrival is unserved"));
                }
                if self.writing {
                    return Err(IllegalOp::new("startRead during an active write"));
                }
                self.ticket += 1;
                self.serving += 1;
                self.rcnt += 1;
                Ok(Value::Unit)
            }
            "endRead" => {
                if self.rcnt == 0 {
                    return Err(IllegalOp::new("endRead without an active reader"));
                }
                self.rcnt -= 1;
                Ok(Value::Unit)
            }
            "startWrite" => {
                if self.serving != self.ticket {
                    return Err(IllegalOp::new("startWrite while an arrival is unserved"));
                }
                if self.rcnt != 0 {
                    return Err(IllegalOp::new("startWrite with active readers"));
                }
                if self.writing {
                    return Err(IllegalOp::new("startWrite during an active write"));
                }
                self.ticket += 1;
                self.writing = true;
                Ok(Value::Unit)
            }
            "endWrite" => {
                if !self.writing {
                    return Err(IllegalOp::new("endWrite without an active write"));
                }
                self.serving += 1;
                self.writing = false;
                Ok(Value::Unit)
            }
            "snapshot" => Ok(Value::List(vec![self.ticket, self.serving, self.rcnt])),
            other => Err(IllegalOp::new(format!("unknown ticket method `{other}`"))),
        }
    }

    fn boxed_clone(&self) -> Box<dyn SequentialSpec> {
        Box::new(self.clone())
    }
}
