//! The monitor runtime: executor threads, guarded-task scheduling with
//! automatic signaling, blocking/non-blocking submission, pending-task
//! limits, exception policies and shutdown.
//!
//! Each monitor is statically assigned to exactly one executor thread for
//! the lifetime of the runtime; that thread constructs and owns the
//! monitor's state, so preconditions and bodies run race-free without
//! locking the state itself. Worker threads interact only through the
//! submission queues and completion handles.
//!
//! Automatic signaling falls out of the executor loop: after every state
//! change it re-evaluates the preconditions of all lane heads, so no task
//! ever needs an explicit notify. The executor parks on an eventcount when
//! nothing is executable and is woken by new submissions or shutdown.

use std::any::Any;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, AtomicU8, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use crate::config::{ExceptionPolicy, HookDecision, OrderingMode, RuntimeConfig, TaskErrorContext};
use crate::error::{AwaitError, ShutdownError, StartError, SubmitError, TaskFailure};
use crate::handle::{CompletionHandle, HandleCore};
use crate::history::{EventKind, History, Recorder};
use crate::queue::{CloseMode, MonitorQueues};
use crate::spec::{BodyError, MethodKind, MethodSpec, MonitorSpec};
use crate::task::TaskInstance;
use crate::value::{Scratch, Value};
use crate::{MonitorId, WorkerId};

const RUNNING: u8 = 0;
const DRAIN: u8 = 1;
const ABORT: u8 = 2;

/// Logical thread ids of executors start here so they cannot collide with
/// small worker ids chosen by drivers.
pub const EXECUTOR_ID_BASE: u64 = 1 << 32;

/// How `shutdown` treats queued work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShutdownMode {
    /// Refuse new submissions, run until all lanes are empty or only
    /// unexecutable heads remain (reported as stranded), then join.
    Drain,
    /// Stop after currently running bodies finish; every still-pending
    /// handle fails with `TaskFailure::Shutdown`.
    Abort,
}

struct MonitorShared {
    id: MonitorId,
    name: Arc<str>,
    spec: MonitorSpec,
    queues: Mutex<MonitorQueues>,
    /// Wakes submitters blocked on the pending limit.
    limit_cv: Condvar,
    executor: usize,
}

struct ExecutorShared {
    logical_id: u64,
    /// Eventcount: bumped by every submission routed here and by shutdown.
    wake: Mutex<u64>,
    wake_cv: Condvar,
    sweeps: AtomicU64,
}

struct RuntimeInner {
    control: AtomicU8,
    monitors: Vec<Arc<MonitorShared>>,
    executors: Vec<Arc<ExecutorShared>>,
    recorder: Arc<Recorder>,
    next_call: AtomicU64,
    next_stamp: AtomicU64,
    tasks_executed: AtomicU64,
    purity_violations: AtomicU64,
    stranded: Mutex<Vec<u64>>,
    config: RuntimeConfig,
}

/// Counters exposed for tests and diagnostics.
#[derive(Clone, Debug)]
pub struct RuntimeStats {
    /// Scheduler sweeps per executor. An idle executor parks instead of
    /// polling, so this stays flat while no work arrives.
    pub executor_sweeps: Vec<u64>,
    pub tasks_executed: u64,
    /// Precondition evaluations that mutated monitor state, detected via the
    /// monitor's registered fingerprint function.
    pub purity_violations: u64,
}

struct ShutdownState {
    joins: Vec<JoinHandle<()>>,
    result: Option<Result<(), ShutdownError>>,
}

/// A running set of monitors served by executor threads.
pub struct MonitorRuntime {
    inner: Arc<RuntimeInner>,
    shutdown: Mutex<ShutdownState>,
}

impl MonitorRuntime {
    /// Validates the specs, spawns `min(max_monitor_threads, monitors)`
    /// executor threads and assigns each monitor to one of them
    /// (round-robin, static for the run). Monitor states are constructed on
    /// their executor thread.
    pub fn start(config: RuntimeConfig, specs: Vec<MonitorSpec>) -> Result<Self, StartError> {
        if config.max_monitor_threads == 0 {
            return Err(StartError::InvalidConfig(
                "max_monitor_threads must be >= 1".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for spec in &specs {
            if !seen.insert(spec.name().to_string()) {
                return Err(StartError::DuplicateMonitor(spec.name().to_string()));
            }
            let mut methods = std::collections::HashSet::new();
            for m in spec.methods() {
                if !methods.insert(m.name().to_string()) {
                    return Err(StartError::DuplicateMethod {
                        monitor: spec.name().to_string(),
                        method: m.name().to_string(),
                    });
                }
            }
            spec.validate().map_err(|source| StartError::Spec {
                monitor: spec.name().to_string(),
                source,
            })?;
        }

        let n_exec = config.max_monitor_threads.min(specs.len());
        let executors: Vec<Arc<ExecutorShared>> = (0..n_exec)
            .map(|i| {
                Arc::new(ExecutorShared {
                    logical_id: EXECUTOR_ID_BASE + i as u64,
                    wake: Mutex::new(0),
                    wake_cv: Condvar::new(),
                    sweeps: AtomicU64::new(0),
                })
            })
            .collect();

        let monitors: Vec<Arc<MonitorShared>> = specs
            .into_iter()
            .enumerate()
            .map(|(i, spec)| {
                Arc::new(MonitorShared {
                    id: MonitorId(i as u32),
                    name: Arc::from(spec.name()),
                    spec,
                    queues: Mutex::new(MonitorQueues::new()),
                    limit_cv: Condvar::new(),
                    executor: if n_exec == 0 { 0 } else { i % n_exec },
                })
            })
            .collect();

        let inner = Arc::new(RuntimeInner {
            control: AtomicU8::new(RUNNING),
            monitors,
            executors,
            recorder: Arc::new(Recorder::new(config.history_recording)),
            next_call: AtomicU64::new(1),
            next_stamp: AtomicU64::new(1),
            tasks_executed: AtomicU64::new(0),
            purity_violations: AtomicU64::new(0),
            stranded: Mutex::new(Vec::new()),
            config,
        });

        let mut joins = Vec::with_capacity(n_exec);
        for idx in 0..n_exec {
            let inner_cl = Arc::clone(&inner);
            let handle = std::thread::Builder::new()
                .name(format!("monitor-exec-{idx}"))
                .spawn(move || executor_main(inner_cl, idx))
                .map_err(StartError::SpawnFailure)?;
            joins.push(handle);
        }

        Ok(MonitorRuntime {
            inner,
            shutdown: Mutex::new(ShutdownState {
                joins,
                result: None,
            }),
        })
    }

    pub fn monitor_id(&self, name: &str) -> Option<MonitorId> {
        self.inner
            .monitors
            .iter()
            .find(|m| &*m.name == name)
            .map(|m| m.id)
    }

    pub fn monitor_count(&self) -> usize {
        self.inner.monitors.len()
    }

    pub fn executor_count(&self) -> usize {
        self.inner.executors.len()
    }

    /// Static monitor-to-executor assignment, as (monitor, executor index).
    pub fn assignment(&self) -> Vec<(MonitorId, usize)> {
        self.inner
            .monitors
            .iter()
            .map(|m| (m.id, m.executor))
            .collect()
    }

    /// Creates a submission session for one worker thread. Each concurrent
    /// submitter must use its own id and session; the (submitter, seq)
    /// ordering of tasks relies on it.
    pub fn worker(&self, id: WorkerId) -> WorkerSession<'_> {
        WorkerSession {
            inner: &self.inner,
            id,
            seq: 0,
            last_nonblocking: None,
        }
    }

    pub fn stats(&self) -> RuntimeStats {
        RuntimeStats {
            executor_sweeps: self
                .inner
                .executors
                .iter()
                .map(|e| e.sweeps.load(Ordering::Relaxed))
                .collect(),
            tasks_executed: self.inner.tasks_executed.load(Ordering::Relaxed),
            purity_violations: self.inner.purity_violations.load(Ordering::Relaxed),
        }
    }

    /// Stops the runtime. Idempotent; repeated calls return the first result.
    pub fn shutdown(&self, mode: ShutdownMode) -> Result<(), ShutdownError> {
        let mut state = self.shutdown.lock().expect("shutdown lock poisoned");
        if let Some(res) = &state.result {
            return res.clone();
        }
        let close = match mode {
            ShutdownMode::Drain => CloseMode::Drain,
            ShutdownMode::Abort => CloseMode::Abort,
        };
        // Close all queues first: after this loop no submission can enqueue,
        // so an executor observing the control change below sees the final
        // contents of every lane.
        for m in &self.inner.monitors {
            let mut q = m.queues.lock().expect("queue lock poisoned");
            q.closed = Some(close);
            m.limit_cv.notify_all();
        }
        self.inner.control.store(
            match mode {
                ShutdownMode::Drain => DRAIN,
                ShutdownMode::Abort => ABORT,
            },
            Ordering::SeqCst,
        );
        for ex in &self.inner.executors {
            let mut g = ex.wake.lock().expect("wake lock poisoned");
            *g += 1;
            ex.wake_cv.notify_all();
        }
        for join in state.joins.drain(..) {
            join.join().expect("executor thread panicked");
        }
        let mut stranded =
            std::mem::take(&mut *self.inner.stranded.lock().expect("stranded lock poisoned"));
        stranded.sort_unstable();
        let result = if matches!(mode, ShutdownMode::Drain) && !stranded.is_empty() {
            Err(ShutdownError::Stranded(stranded))
        } else {
            Ok(())
        };
        state.result = Some(result.clone());
        result
    }

    /// Merges and returns all recorded events. Meaningful after `shutdown`.
    pub fn take_history(&self) -> History {
        self.inner.recorder.drain()
    }
}

impl Drop for MonitorRuntime {
    fn drop(&mut self) {
        let started = {
            let state = self.shutdown.lock().expect("shutdown lock poisoned");
            state.result.is_none()
        };
        if started {
            let _ = self.shutdown(ShutdownMode::Abort);
        }
    }
}

/// Result of a submission: blocking calls return the chain's value directly,
/// non-blocking calls return a handle.
#[derive(Debug)]
pub enum Submitted {
    Value(Value),
    Handle(CompletionHandle),
}

impl Submitted {
    pub fn into_handle(self) -> CompletionHandle {
        match self {
            Submitted::Handle(h) => h,
            Submitted::Value(_) => panic!("blocking submission returned a value, not a handle"),
        }
    }

    pub fn into_value(self) -> Value {
        match self {
            Submitted::Value(v) => v,
            Submitted::Handle(_) => panic!("non-blocking submission returned a handle"),
        }
    }
}

/// Per-worker submission state: the sequence counter realizing per-submitter
/// task order, and the most recent non-blocking handle for the strict-mode
/// cross-monitor rule.
pub struct WorkerSession<'rt> {
    inner: &'rt Arc<RuntimeInner>,
    id: WorkerId,
    seq: u64,
    last_nonblocking: Option<(MonitorId, Arc<HandleCore>)>,
}

impl WorkerSession<'_> {
    pub fn worker_id(&self) -> WorkerId {
        self.id
    }

    /// Submits a call to `method` on `monitor`.
    ///
    /// Blocking methods suspend the caller until the whole stage chain
    /// completes and return the final value. Non-blocking methods return a
    /// handle immediately after enqueue, except that a full pending-limit
    /// budget suspends the caller until a slot frees, and a pending limit of
    /// zero degenerates the submission into a blocking one. In strict mode,
    /// if this worker's most recent prior submission was a still-incomplete
    /// non-blocking call on a different monitor, the caller is suspended
    /// until that call completes before this one is enqueued.
    pub fn submit(
        &mut self,
        monitor: MonitorId,
        method: &str,
        args: Vec<Value>,
    ) -> Result<Submitted, SubmitError> {
        let inner = self.inner;
        if inner.control.load(Ordering::SeqCst) != RUNNING {
            return Err(SubmitError::RuntimeShutDown);
        }
        let mshared = inner
            .monitors
            .get(monitor.0 as usize)
            .ok_or(SubmitError::MonitorUnknown(monitor.0))?;
        let method_spec: Arc<MethodSpec> =
            mshared
                .spec
                .method_named(method)
                .cloned()
                .ok_or_else(|| SubmitError::MethodUnknown {
                    monitor: mshared.name.to_string(),
                    method: method.to_string(),
                })?;

        if inner.config.ordering_mode == OrderingMode::Strict {
            if let Some((prev_monitor, prev)) = &self.last_nonblocking {
                if *prev_monitor != monitor && !prev.is_settled() {
                    // Completion or failure both release the submitter.
                    let _ = prev.wait(None);
                }
            }
        }

        let blocking = method_spec.kind() == MethodKind::Blocking;
        let degenerate_blocking = !blocking && inner.config.pending_limit == Some(0);
        let counted = !blocking && !degenerate_blocking;
        let n_stages = method_spec.stage_count() as u64;
        let seq_base = self.seq;
        self.seq += n_stages;
        let call_id = inner.next_call.fetch_add(1, Ordering::Relaxed);
        let method_name: Arc<str> = Arc::from(method_spec.name());
        let handle = HandleCore::new(
            call_id,
            monitor.0,
            self.id.0,
            Arc::clone(&method_name),
            (n_stages - 1) as u32,
            seq_base + n_stages - 1,
            blocking || degenerate_blocking,
            Some(Arc::clone(&inner.recorder)),
        );
        let args: Arc<[Value]> = Arc::from(args);

        {
            let mut q = mshared.queues.lock().expect("queue lock poisoned");
            if q.closed.is_some() {
                return Err(SubmitError::RuntimeShutDown);
            }
            if counted {
                if let Some(limit) = inner.config.pending_limit {
                    while q.pending_nb >= limit {
                        q = mshared.limit_cv.wait(q).expect("queue lock poisoned");
                        if q.closed.is_some() {
                            return Err(SubmitError::RuntimeShutDown);
                        }
                    }
                }
                q.pending_nb += 1;
            }
            // The submission instant: recorded before the push so the
            // executor's exec-start can never carry an earlier timestamp.
            inner.recorder.record(
                EventKind::Submit,
                call_id,
                monitor.0,
                self.id.0,
                &method_name,
                0,
                seq_base,
                blocking || degenerate_blocking,
                Some(Arc::clone(&args)),
                None,
            );
            q.push_back(TaskInstance {
                call_id,
                monitor,
                submitter: self.id,
                seq: seq_base,
                stamp: inner.next_stamp.fetch_add(1, Ordering::Relaxed),
                stage_idx: 0,
                attempts: 0,
                method: method_spec,
                args,
                scratch: Scratch::new(),
                handle: Arc::clone(&handle),
                counted,
            });
        }
        wake_executor(inner, mshared.executor);

        if blocking || degenerate_blocking {
            self.last_nonblocking = None;
            match handle.wait(None) {
                Ok((value, _)) => {
                    handle.record_await_return();
                    Ok(Submitted::Value(value))
                }
                Err(AwaitError::Task(f)) => Err(SubmitError::Task(f)),
                Err(AwaitError::Timeout) => unreachable!("no timeout on this wait"),
            }
        } else {
            self.last_nonblocking = Some((monitor, Arc::clone(&handle)));
            Ok(Submitted::Handle(CompletionHandle { core: handle }))
        }
    }

    /// Submission that always waits for the value: blocking methods behave as
    /// usual, non-blocking methods are submitted and immediately awaited.
    pub fn call(
        &mut self,
        monitor: MonitorId,
        method: &str,
        args: Vec<Value>,
    ) -> Result<Value, SubmitError> {
        match self.submit(monitor, method, args)? {
            Submitted::Value(v) => Ok(v),
            Submitted::Handle(h) => h.await_result(None).map_err(|e| match e {
                AwaitError::Task(f) => SubmitError::Task(f),
                AwaitError::Timeout => unreachable!("no timeout on this wait"),
            }),
        }
    }

    /// Awaits a handle, which also orders this worker's subsequent
    /// submissions after the awaited call.
    pub fn await_result(
        &mut self,
        handle: &CompletionHandle,
        timeout: Option<Duration>,
    ) -> Result<Value, AwaitError> {
        handle.await_result(timeout)
    }
}

fn wake_executor(inner: &RuntimeInner, idx: usize) {
    let ex = &inner.executors[idx];
    let mut g = ex.wake.lock().expect("wake lock poisoned");
    *g += 1;
    ex.wake_cv.notify_one();
}

type StateBox = Box<dyn Any>;

fn executor_main(inner: Arc<RuntimeInner>, idx: usize) {
    let me = Arc::clone(&inner.executors[idx]);
    let assigned: Vec<Arc<MonitorShared>> = inner
        .monitors
        .iter()
        .filter(|m| m.executor == idx)
        .cloned()
        .collect();
    // Monitor states live and die on this thread.
    let mut states: HashMap<u32, StateBox> = assigned
        .iter()
        .map(|m| (m.id.0, (m.spec.state_init)()))
        .collect();

    loop {
        let epoch = *me.wake.lock().expect("wake lock poisoned");
        let control = inner.control.load(Ordering::SeqCst);
        if control == ABORT {
            close_out(&inner, &assigned, TaskFailure::Shutdown);
            return;
        }
        me.sweeps.fetch_add(1, Ordering::Relaxed);
        // Round-robin: at most one task per monitor per sweep, so two
        // monitors on one executor make progress together.
        let mut ran = false;
        for m in &assigned {
            if let Some(task) = pop_next(&inner, m, &states) {
                run_task(&inner, m, task, &mut states);
                ran = true;
            }
        }
        if ran {
            continue;
        }
        if control == DRAIN {
            // Queues were closed before the control flag was set, so this
            // fruitless sweep saw the final lane contents: anything left is
            // permanently unexecutable.
            close_out(&inner, &assigned, TaskFailure::Stranded);
            return;
        }
        let mut g = me.wake.lock().expect("wake lock poisoned");
        while *g == epoch {
            g = me.wake_cv.wait(g).expect("wake lock poisoned");
        }
    }
}

fn pop_next(
    inner: &RuntimeInner,
    m: &MonitorShared,
    states: &HashMap<u32, StateBox>,
) -> Option<TaskInstance> {
    let state = states
        .get(&m.id.0)
        .expect("state exists for assigned monitor");
    let fingerprint = m.spec.fingerprint.as_ref();
    let mut q = m.queues.lock().expect("queue lock poisoned");
    q.schedule_next(|task| {
        let st: &dyn Any = &**state;
        match fingerprint {
            None => task.stage().eval_precondition(st, &task.args, &task.scratch),
            Some(fp) => {
                let before = fp(st);
                let executable = task.stage().eval_precondition(st, &task.args, &task.scratch);
                if fp(st) != before {
                    inner.purity_violations.fetch_add(1, Ordering::Relaxed);
                }
                executable
            }
        }
    })
}

enum StageOutcome {
    Done(Value),
    Retry,
    Fail(BodyError),
}

fn run_task(
    inner: &RuntimeInner,
    m: &MonitorShared,
    mut task: TaskInstance,
    states: &mut HashMap<u32, StateBox>,
) {
    debug_assert_eq!(task.monitor, m.id, "task scheduled on its own monitor");
    let exec_id = inner.executors[m.executor].logical_id;
    let method = Arc::clone(&task.method);
    let method_name: Arc<str> = Arc::from(method.name());
    task.attempts += 1;
    task.handle.note_attempt();
    task.handle.mark_running();
    inner.recorder.record(
        EventKind::ExecStart,
        task.call_id,
        m.id.0,
        exec_id,
        &method_name,
        task.stage_idx as u32,
        task.seq,
        task.handle.blocking,
        None,
        None,
    );

    let stage = &method.stages()[task.stage_idx];
    let args = Arc::clone(&task.args);
    let mut scratch = std::mem::take(&mut task.scratch);
    let body_result = {
        let state = states.get_mut(&m.id.0).expect("state exists");
        stage.run_body(&mut **state, &args, &mut scratch)
    };
    task.scratch = scratch;
    inner.tasks_executed.fetch_add(1, Ordering::Relaxed);

    let outcome = match body_result {
        Ok(v) => StageOutcome::Done(v),
        Err(err) => match &inner.config.exception_policy {
            ExceptionPolicy::Ignore => StageOutcome::Fail(err),
            ExceptionPolicy::Retry(max_attempts) => {
                if task.attempts < *max_attempts {
                    StageOutcome::Retry
                } else {
                    StageOutcome::Fail(err)
                }
            }
            ExceptionPolicy::Hook(hook) => {
                let state = states.get(&m.id.0).expect("state exists");
                let ctx = TaskErrorContext {
                    monitor: &m.name,
                    method: method.name(),
                    stage: task.stage_idx,
                    attempts: task.attempts,
                    error: &err,
                    state: &**state,
                };
                match hook(&ctx) {
                    HookDecision::Retry => StageOutcome::Retry,
                    HookDecision::Fail => StageOutcome::Fail(err),
                    HookDecision::Substitute(v) => StageOutcome::Done(v),
                }
            }
        },
    };

    match outcome {
        StageOutcome::Done(value) => {
            let is_final = task.is_final_stage();
            inner.recorder.record(
                EventKind::ExecEnd,
                task.call_id,
                m.id.0,
                exec_id,
                &method_name,
                task.stage_idx as u32,
                task.seq,
                task.handle.blocking,
                None,
                is_final.then(|| value.clone()),
            );
            if is_final {
                settle_chain(m, &task, Ok(value));
            } else {
                let stamp = inner.next_stamp.fetch_add(1, Ordering::Relaxed);
                let successor = task.advance(stamp);
                let mut q = m.queues.lock().expect("queue lock poisoned");
                q.push_front(successor);
            }
        }
        StageOutcome::Retry => {
            inner.recorder.record(
                EventKind::ExecEnd,
                task.call_id,
                m.id.0,
                exec_id,
                &method_name,
                task.stage_idx as u32,
                task.seq,
                task.handle.blocking,
                None,
                None,
            );
            // Back to the lane head: the retried stage still precedes every
            // later task of this submitter.
            let mut q = m.queues.lock().expect("queue lock poisoned");
            q.push_front(task);
        }
        StageOutcome::Fail(err) => {
            inner.recorder.record(
                EventKind::ExecEnd,
                task.call_id,
                m.id.0,
                exec_id,
                &method_name,
                task.stage_idx as u32,
                task.seq,
                task.handle.blocking,
                None,
                None,
            );
            let failure = TaskFailure::Body {
                message: err.0,
                attempts: task.attempts,
            };
            // Successor stages are never enqueued: dropping the task here
            // cancels the rest of the chain.
            settle_chain(m, &task, Err(failure));
        }
    }
}

/// Settles the chain's handle and releases its pending-limit slot. The
/// exec-end record is written by the caller first, so any event caused by
/// the completion carries a later timestamp.
fn settle_chain(m: &MonitorShared, task: &TaskInstance, outcome: Result<Value, TaskFailure>) {
    match outcome {
        Ok(v) => task.handle.complete(v),
        Err(f) => task.handle.fail(f),
    }
    if task.counted {
        let mut q = m.queues.lock().expect("queue lock poisoned");
        q.pending_nb -= 1;
        drop(q);
        m.limit_cv.notify_all();
    }
}

fn close_out(inner: &RuntimeInner, assigned: &[Arc<MonitorShared>], failure: TaskFailure) {
    for m in assigned {
        let leftovers = {
            let mut q = m.queues.lock().expect("queue lock poisoned");
            q.pending_nb = 0;
            q.drain_all()
        };
        m.limit_cv.notify_all();
        if matches!(failure, TaskFailure::Stranded) && !leftovers.is_empty() {
            let mut stranded = inner.stranded.lock().expect("stranded lock poisoned");
            stranded.extend(leftovers.iter().map(|t| t.call_id));
        }
        for t in leftovers {
            t.handle.fail(failure.clone());
        }
    }
}
