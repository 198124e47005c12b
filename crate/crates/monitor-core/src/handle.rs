//! Completion handles: the caller-side view of a submitted call.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use crate::error::{AwaitError, TaskFailure};
use crate::history::{EventKind, Recorder};
use crate::value::Value;

/// Status snapshot of a call. Transitions are monotone:
/// `Pending → Running → (Completed | Failed)`. A retried stage re-executes
/// while the handle stays `Running`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HandleStatus {
    Pending,
    Running,
    Completed(Value),
    Failed(TaskFailure),
}

struct HandleState {
    status: HandleStatus,
    attempts: u32,
    waiters: u32,
}

pub(crate) struct HandleCore {
    state: Mutex<HandleState>,
    cv: Condvar,
    awaited: AtomicBool,
    // Identity carried for the AwaitReturn record.
    pub(crate) call_id: u64,
    pub(crate) monitor: u32,
    pub(crate) submitter: u64,
    pub(crate) method: Arc<str>,
    pub(crate) final_stage: u32,
    pub(crate) final_seq: u64,
    pub(crate) blocking: bool,
    pub(crate) recorder: Option<Arc<Recorder>>,
}

impl HandleCore {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        call_id: u64,
        monitor: u32,
        submitter: u64,
        method: Arc<str>,
        final_stage: u32,
        final_seq: u64,
        blocking: bool,
        recorder: Option<Arc<Recorder>>,
    ) -> Arc<Self> {
        Arc::new(HandleCore {
            state: Mutex::new(HandleState {
                status: HandleStatus::Pending,
                attempts: 0,
                waiters: 0,
            }),
            cv: Condvar::new(),
            awaited: AtomicBool::new(false),
            call_id,
            monitor,
            submitter,
            method,
            final_stage,
            final_seq,
            blocking,
            recorder,
        })
    }

    pub(crate) fn mark_running(&self) {
        let mut st = self.state.lock().expect("handle lock poisoned");
        if matches!(st.status, HandleStatus::Pending) {
            st.status = HandleStatus::Running;
        }
    }

    pub(crate) fn note_attempt(&self) {
        let mut st = self.state.lock().expect("handle lock poisoned");
        st.attempts += 1;
    }

    pub(crate) fn complete(&self, value: Value) {
        self.settle(HandleStatus::Completed(value));
    }

    pub(crate) fn fail(&self, failure: TaskFailure) {
        self.settle(HandleStatus::Failed(failure));
    }

    fn settle(&self, status: HandleStatus) {
        let mut st = self.state.lock().expect("handle lock poisoned");
        if matches!(st.status, HandleStatus::Completed(_) | HandleStatus::Failed(_)) {
            return;
        }
        st.status = status;
        if st.waiters > 0 {
            self.cv.notify_all();
        }
    }

    pub(crate) fn is_settled(&self) -> bool {
        let st = self.state.lock().expect("handle lock poisoned");
        matches!(st.status, HandleStatus::Completed(_) | HandleStatus::Failed(_))
    }

    pub(crate) fn attempts(&self) -> u32 {
        self.state.lock().expect("handle lock poisoned").attempts
    }

    /// Blocks until settled or the deadline passes.
    pub(crate) fn wait(&self, timeout: Option<Duration>) -> Result<(Value, u32), AwaitError> {
        let deadline = timeout.map(|d| Instant::now() + d);
        let mut st = self.state.lock().expect("handle lock poisoned");
        loop {
            match &st.status {
                HandleStatus::Completed(v) => return Ok((v.clone(), st.attempts)),
                HandleStatus::Failed(f) => return Err(AwaitError::Task(f.clone())),
                _ => {}
            }
            let (guard, timed_out) = match deadline {
                None => {
                    st.waiters += 1;
                    (self.cv.wait(st).expect("handle lock poisoned"), false)
                }
                Some(d) => {
                    let now = Instant::now();
                    if now >= d {
                        return Err(AwaitError::Timeout);
                    }
                    st.waiters += 1;
                    let (g, t) = self
                        .cv
                        .wait_timeout(st, d - now)
                        .expect("handle lock poisoned");
                    (g, t.timed_out())
                }
            };
            st = guard;
            st.waiters -= 1;
            if timed_out
                && !matches!(
                    st.status,
                    HandleStatus::Completed(_) | HandleStatus::Failed(_)
                )
            {
                return Err(AwaitError::Timeout);
            }
        }
    }

    /// Records the await-return dependency event once per handle.
    pub(crate) fn record_await_return(&self) {
        if self.awaited.swap(true, Ordering::Relaxed) {
            return;
        }
        if let Some(rec) = &self.recorder {
            rec.record(
                EventKind::AwaitReturn,
                self.call_id,
                self.monitor,
                self.submitter,
                &self.method,
                self.final_stage,
                self.final_seq,
                self.blocking,
                None,
                None,
            );
        }
    }

    pub(crate) fn was_awaited(&self) -> bool {
        self.awaited.load(Ordering::Relaxed)
    }
}

/// Caller-side view of a submitted call: await the result, poll the status.
///
/// Cloneable and shareable across threads; any thread may await it.
#[derive(Clone)]
pub struct CompletionHandle {
    pub(crate) core: Arc<HandleCore>,
}

impl CompletionHandle {
    /// The call id this handle tracks (the `task_id` of its history events).
    pub fn call_id(&self) -> u64 {
        self.core.call_id
    }

    pub fn method(&self) -> &str {
        &self.core.method
    }

    pub fn status(&self) -> HandleStatus {
        self.core
            .state
            .lock()
            .expect("handle lock poisoned")
            .status
            .clone()
    }

    /// Total body executions so far (greater than one only under retries).
    pub fn attempts(&self) -> u32 {
        self.core.attempts()
    }

    pub fn is_settled(&self) -> bool {
        self.core.is_settled()
    }

    /// Whether some caller has already awaited this handle.
    pub fn was_awaited(&self) -> bool {
        self.core.was_awaited()
    }

    /// Suspends the caller until the call chain completes or fails, returning
    /// the final stage's value. Records the dependency event used by the
    /// relaxed-mode thread order: operations the submitter issues after this
    /// await are ordered after the awaited call.
    pub fn await_result(&self, timeout: Option<Duration>) -> Result<Value, AwaitError> {
        let (value, _) = self.core.wait(timeout)?;
        self.core.record_await_return();
        Ok(value)
    }
}

impl std::fmt::Debug for CompletionHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompletionHandle")
            .field("call_id", &self.core.call_id)
            .field("method", &self.core.method)
            .field("status", &self.status())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn handle() -> Arc<HandleCore> {
        HandleCore::new(1, 0, 0, Arc::from("m"), 0, 0, false, None)
    }

    #[test]
    fn await_on_completed_returns_immediately() {
        let core = handle();
        core.complete(Value::Int(7));
        let h = CompletionHandle { core };
        assert_eq!(h.await_result(None).unwrap(), Value::Int(7));
        assert!(h.was_awaited());
    }

    #[test]
    fn await_timeout_on_pending() {
        let h = CompletionHandle { core: handle() };
        let err = h.await_result(Some(Duration::from_millis(20))).unwrap_err();
        assert_eq!(err, AwaitError::Timeout);
        assert_eq!(h.status(), HandleStatus::Pending);
    }

    #[test]
    fn settle_is_monotone() {
        let core = handle();
        core.mark_running();
        core.complete(Value::Int(1));
        core.fail(TaskFailure::Shutdown); // ignored: already settled
        let h = CompletionHandle { core };
        assert_eq!(h.status(), HandleStatus::Completed(Value::Int(1)));
    }

    #[test]
    fn concurrent_awaiter_wakes() {
        let core = handle();
        let h = CompletionHandle { core: core.clone() };
        let waiter = std::thread::spawn(move || h.await_result(Some(Duration::from_secs(5))));
        std::thread::sleep(Duration::from_millis(30));
        core.complete(Value::Int(9));
        assert_eq!(waiter.join().unwrap().unwrap(), Value::Int(9));
    }
}
