//! Workload drivers: seeded worker threads running against either the
//! monitor runtime or the lock-based baselines, with a warm-up phase
//! excluded from timing.
//!
//! Phase protocol: every worker runs its warm-up operations and waits on a
//! barrier together with the timing thread; the measured phase starts when
//! the barrier releases and ends when every worker has finished its
//! operations (non-blocking callers await their final handle, so all
//! submitted work is complete when the clock stops).

use std::sync::{Barrier, Mutex};
use std::time::{Duration, Instant};

use monitor_core::{
    CompletionHandle, History, MonitorRuntime, RuntimeConfig, ShutdownMode, Value, WorkerId,
};

use crate::error::WorkloadError;
use crate::locks::{CoarseBuffer, CoarseList, CoarseRoundRobin, CoarseTicketRw, FineGrainedList};
use crate::monitors;
use crate::streams;

/// The five benchmark workloads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Workload {
    BoundedBuffer,
    SortedList,
    RoundRobin,
    ParamBuffer,
    TicketedRw,
}

impl Workload {
    pub fn id(self) -> &'static str {
        match self {
            Workload::BoundedBuffer => "bb",
            Workload::SortedList => "sll",
            Workload::RoundRobin => "rr",
            Workload::ParamBuffer => "pbb",
            Workload::TicketedRw => "trw",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Some(match id {
            "bb" => Workload::BoundedBuffer,
            "sll" => Workload::SortedList,
            "rr" => Workload::RoundRobin,
            "pbb" => Workload::ParamBuffer,
            "trw" => Workload::TicketedRw,
            _ => return None,
        })
    }

    pub const ALL: [Workload; 5] = [
        Workload::BoundedBuffer,
        Workload::SortedList,
        Workload::RoundRobin,
        Workload::ParamBuffer,
        Workload::TicketedRw,
    ];
}

/// Parameters of one workload execution.
#[derive(Clone, Debug)]
pub struct WorkloadConfig {
    pub workload: Workload,
    /// Producer/consumer pairs for the buffers, workers for list and
    /// round-robin, writers for ticketed readers/writers.
    pub threads: usize,
    pub ops_per_thread: usize,
    pub buffer_size: usize,
    /// Integer additions performed between successive monitor calls.
    pub outside_cs_work: u64,
    pub seed: u64,
    /// Readers per writer in the ticketed workload.
    pub reader_multiplier: usize,
    /// Per-thread operations run before the clock starts.
    pub warmup_ops: usize,
    pub list_prepopulate: usize,
}

impl WorkloadConfig {
    pub fn new(workload: Workload, threads: usize, ops_per_thread: usize) -> Self {
        WorkloadConfig {
            workload,
            threads,
            ops_per_thread,
            buffer_size: 4,
            outside_cs_work: 0,
            seed: 0,
            reader_multiplier: 5,
            warmup_ops: 0,
            list_prepopulate: 5000,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        if self.threads == 0 {
            return Err(WorkloadError::Config("thread count must be >= 1".into()));
        }
        if self.workload == Workload::RoundRobin && self.threads < 2 {
            return Err(WorkloadError::Config(
                "round-robin needs at least 2 threads".into(),
            ));
        }
        if matches!(self.workload, Workload::BoundedBuffer | Workload::ParamBuffer)
            && self.buffer_size == 0
        {
            return Err(WorkloadError::Config("buffer size must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of OS worker threads the driver spawns.
    pub fn worker_count(&self) -> usize {
        match self.workload {
            Workload::BoundedBuffer | Workload::ParamBuffer => self.threads * 2,
            Workload::SortedList | Workload::RoundRobin => self.threads,
            Workload::TicketedRw => self.threads * (1 + self.reader_multiplier),
        }
    }
}

/// Result of one driver execution.
#[derive(Debug)]
pub struct RunOutput {
    /// Measured wall time of the timed phase.
    pub wall: Duration,
    /// Recorded history (monitor runs with recording enabled).
    pub history: Option<History>,
    /// Final state read back after the timed phase.
    pub final_snapshot: Option<Value>,
    /// Values taken by baseline consumers, when collection was requested.
    pub taken_values: Option<Vec<i64>>,
}

/// Burns `iterations` integer additions; the accumulator is routed through
/// `black_box` so the loop cannot be folded away.
#[inline]
pub fn outside_work(iterations: u64) -> u64 {
    let mut acc: u64 = 0;
    for i in 0..iterations {
        acc = acc.wrapping_add(std::hint::black_box(i));
    }
    std::hint::black_box(acc)
}

struct Phases<'a> {
    warmup: usize,
    barrier: &'a Barrier,
}

type WorkerResult = Result<(), WorkloadError>;

impl Phases<'_> {
    /// Runs `total` operation slots split into warm-up and measured phases.
    /// `op` returns the completion handle of a non-blocking submission (or
    /// `None` for blocking calls); the newest handle is awaited at each
    /// phase end so no submitted work leaks across the timing boundary.
    /// Within one lane tasks complete in order, so awaiting the last handle
    /// covers all earlier ones.
    fn run(
        &self,
        total: usize,
        mut op: impl FnMut(usize) -> Result<Option<CompletionHandle>, WorkloadError>,
    ) -> WorkerResult {
        let mut last: Option<CompletionHandle> = None;
        for i in 0..self.warmup.min(total) {
            if let Some(h) = op(i)? {
                last = Some(h);
            }
        }
        Self::await_last(&mut last)?;
        self.barrier.wait();
        for i in self.warmup.min(total)..total {
            if let Some(h) = op(i)? {
                last = Some(h);
            }
        }
        Self::await_last(&mut last)
    }

    fn await_last(last: &mut Option<CompletionHandle>) -> WorkerResult {
        if let Some(h) = last.take() {
            h.await_result(None)
                .map_err(|e| WorkloadError::Config(format!("task failed: {e}")))?;
        }
        Ok(())
    }
}

fn spec_for(cfg: &WorkloadConfig) -> Result<monitor_core::MonitorSpec, WorkloadError> {
    match cfg.workload {
        Workload::BoundedBuffer => monitors::build_bounded_buffer(cfg.buffer_size),
        Workload::SortedList => Ok(monitors::build_sorted_list(cfg.seed, cfg.list_prepopulate)),
        Workload::RoundRobin => monitors::build_round_robin(cfg.threads),
        Workload::ParamBuffer => monitors::build_parametrized_buffer(cfg.buffer_size),
        Workload::TicketedRw => Ok(monitors::build_ticketed_rw()),
    }
}

/// Runs the workload on the monitor runtime.
pub fn run_active(cfg: &WorkloadConfig, rcfg: RuntimeConfig) -> Result<RunOutput, WorkloadError> {
    cfg.validate()?;
    let recording = rcfg.history_recording;
    let spec = spec_for(cfg)?;
    let name = spec.name().to_string();
    let rt = MonitorRuntime::start(rcfg, vec![spec])?;
    let m = rt.monitor_id(&name).expect("monitor just registered");
    let total = cfg.warmup_ops + cfg.ops_per_thread;
    let worker_count = cfg.worker_count();
    let barrier = Barrier::new(worker_count + 1);

    let wall = std::thread::scope(|s| -> Result<Duration, WorkloadError> {
        let mut handles = Vec::with_capacity(worker_count);
        let rt_ref = &rt;
        let barrier_ref = &barrier;
        match cfg.workload {
            Workload::BoundedBuffer => {
                for p in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let values = streams::buffer_values(cfg.seed, p as u64, total);
                        let mut sess = rt_ref.worker(WorkerId(p as u64));
                        phases.run(total, |i| {
                            outside_work(cfg.outside_cs_work);
                            let sub = sess.submit(m, "put", vec![Value::Int(values[i])])?;
                            Ok(Some(sub.into_handle()))
                        })
                    }));
                }
                for c in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let mut sess = rt_ref.worker(WorkerId(1000 + c as u64));
                        phases.run(total, |_| {
                            outside_work(cfg.outside_cs_work);
                            sess.call(m, "take", vec![])?;
                            Ok(None)
                        })
                    }));
                }
            }
            Workload::SortedList => {
                for w in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let ops = streams::list_ops(cfg.seed, w as u64, total);
                        let mut sess = rt_ref.worker(WorkerId(w as u64));
                        phases.run(total, |i| {
                            outside_work(cfg.outside_cs_work);
                            let sub = match ops[i] {
                                streams::ListOp::Insert(v) => {
                                    sess.submit(m, "insert", vec![Value::Int(v)])?
                                }
                                streams::ListOp::Remove(v) => {
                                    sess.submit(m, "remove", vec![Value::Int(v)])?
                                }
                            };
                            Ok(Some(sub.into_handle()))
                        })
                    }));
                }
            }
            Workload::RoundRobin => {
                for w in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let mut sess = rt_ref.worker(WorkerId(w as u64));
                        phases.run(total, |_| {
                            outside_work(cfg.outside_cs_work);
                            let sub = sess.submit(m, "enter", vec![Value::Int(w as i64)])?;
                            Ok(Some(sub.into_handle()))
                        })
                    }));
                }
            }
            Workload::ParamBuffer => {
                for p in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let sizes =
                            streams::batch_sizes(cfg.seed, p as u64, total, cfg.buffer_size);
                        let batches = streams::batch_values(cfg.seed, p as u64, &sizes);
                        let mut sess = rt_ref.worker(WorkerId(p as u64));
                        phases.run(total, |i| {
                            outside_work(cfg.outside_cs_work);
                            let sub = sess.submit(
                                m,
                                "put_batch",
                                vec![Value::List(batches[i].clone())],
                            )?;
                            Ok(Some(sub.into_handle()))
                        })
                    }));
                }
                for c in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        // Consumers replay their paired producer's batch
                        // sizes, so supply and demand match exactly.
                        let sizes =
                            streams::batch_sizes(cfg.seed, c as u64, total, cfg.buffer_size);
                        let mut sess = rt_ref.worker(WorkerId(1000 + c as u64));
                        phases.run(total, |i| {
                            outside_work(cfg.outside_cs_work);
                            sess.call(m, "take_batch", vec![Value::Int(sizes[i] as i64)])?;
                            Ok(None)
                        })
                    }));
                }
            }
            Workload::TicketedRw => {
                for wr in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let mut sess = rt_ref.worker(WorkerId(wr as u64));
                        phases.run(total, |_| {
                            outside_work(cfg.outside_cs_work);
                            sess.call(m, "startWrite", vec![])?;
                            let sub = sess.submit(m, "endWrite", vec![])?;
                            Ok(Some(sub.into_handle()))
                        })
                    }));
                }
                for r in 0..cfg.threads * cfg.reader_multiplier {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let mut sess = rt_ref.worker(WorkerId(2000 + r as u64));
                        phases.run(total, |_| {
                            outside_work(cfg.outside_cs_work);
                            sess.call(m, "startRead", vec![])?;
                            let sub = sess.submit(m, "endRead", vec![])?;
                            Ok(Some(sub.into_handle()))
                        })
                    }));
                }
            }
        }

        barrier.wait();
        let start = Instant::now();
        for h in handles {
            h.join().expect("worker thread panicked")?;
        }
        Ok(start.elapsed())
    })?;

    let mut snapshot_sess = rt.worker(WorkerId(90_000));
    let final_snapshot = snapshot_sess.call(m, "snapshot", vec![])?;
    rt.shutdown(ShutdownMode::Drain)?;
    let history = recording.then(|| rt.take_history());

    Ok(RunOutput {
        wall,
        history,
        final_snapshot: Some(final_snapshot),
        taken_values: None,
    })
}

enum Baseline {
    Buffer(CoarseBuffer),
    List(CoarseList),
    FgList(FineGrainedList),
    RoundRobin(CoarseRoundRobin),
    TicketRw(CoarseTicketRw),
}

/// Runs the workload on the coarse-lock baselines (or the fine-grained list
/// when `fine_grained` is set; only the list workload has one).
pub fn run_locked(
    cfg: &WorkloadConfig,
    fine_grained: bool,
    collect_values: bool,
) -> Result<RunOutput, WorkloadError> {
    cfg.validate()?;
    if fine_grained && cfg.workload != Workload::SortedList {
        return Err(WorkloadError::Config(
            "fine-grained baseline exists only for the sorted list".into(),
        ));
    }
    let backend = match cfg.workload {
        Workload::BoundedBuffer | Workload::ParamBuffer => {
            Baseline::Buffer(CoarseBuffer::new(cfg.buffer_size))
        }
        Workload::SortedList => {
            let initial = streams::prepopulated_list_values(cfg.seed, cfg.list_prepopulate);
            if fine_grained {
                Baseline::FgList(FineGrainedList::new(initial))
            } else {
                Baseline::List(CoarseList::new(initial))
            }
        }
        Workload::RoundRobin => Baseline::RoundRobin(CoarseRoundRobin::new(cfg.threads)),
        Workload::TicketedRw => Baseline::TicketRw(CoarseTicketRw::new()),
    };
    let total = cfg.warmup_ops + cfg.ops_per_thread;
    let worker_count = cfg.worker_count();
    let barrier = Barrier::new(worker_count + 1);
    let taken: Mutex<Vec<i64>> = Mutex::new(Vec::new());

    let wall = std::thread::scope(|s| -> Result<Duration, WorkloadError> {
        let mut handles = Vec::with_capacity(worker_count);
        let backend_ref = &backend;
        let barrier_ref = &barrier;
        let taken_ref = &taken;
        match cfg.workload {
            Workload::BoundedBuffer => {
                for p in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let Baseline::Buffer(buf) = backend_ref else { unreachable!() };
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let values = streams::buffer_values(cfg.seed, p as u64, total);
                        phases.run(total, |i| {
                            outside_work(cfg.outside_cs_work);
                            buf.put(values[i]);
                            Ok(None)
                        })
                    }));
                }
                for _ in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let Baseline::Buffer(buf) = backend_ref else { unreachable!() };
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let mut mine = Vec::new();
                        let out = phases.run(total, |_| {
                            outside_work(cfg.outside_cs_work);
                            let v = buf.take();
                            if collect_values {
                                mine.push(v);
                            }
                            Ok(None)
                        });
                        if collect_values {
                            taken_ref.lock().expect("taken lock").extend(mine.drain(..));
                        }
                        out
                    }));
                }
            }
            Workload::SortedList => {
                for w in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let ops = streams::list_ops(cfg.seed, w as u64, total);
                        phases.run(total, |i| {
                            outside_work(cfg.outside_cs_work);
                            match (backend_ref, ops[i]) {
                                (Baseline::List(l), streams::ListOp::Insert(v)) => l.insert(v),
                                (Baseline::List(l), streams::ListOp::Remove(v)) => {
                                    l.remove(v);
                                }
                                (Baseline::FgList(l), streams::ListOp::Insert(v)) => l.insert(v),
                                (Baseline::FgList(l), streams::ListOp::Remove(v)) => {
                                    l.remove(v);
                                }
                                _ => unreachable!(),
                            }
                            Ok(None)
                        })
                    }));
                }
            }
            Workload::RoundRobin => {
                for w in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let Baseline::RoundRobin(rr) = backend_ref else { unreachable!() };
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        phases.run(total, |_| {
                            outside_work(cfg.outside_cs_work);
                            rr.enter(w as i64);
                            Ok(None)
                        })
                    }));
                }
            }
            Workload::ParamBuffer => {
                for p in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let Baseline::Buffer(buf) = backend_ref else { unreachable!() };
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let sizes =
                            streams::batch_sizes(cfg.seed, p as u64, total, cfg.buffer_size);
                        let batches = streams::batch_values(cfg.seed, p as u64, &sizes);
                        phases.run(total, |i| {
                            outside_work(cfg.outside_cs_work);
                            buf.put_batch(&batches[i]);
                            Ok(None)
                        })
                    }));
                }
                for c in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let Baseline::Buffer(buf) = backend_ref else { unreachable!() };
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        let sizes =
                            streams::batch_sizes(cfg.seed, c as u64, total, cfg.buffer_size);
                        let mut mine = Vec::new();
                        let out = phases.run(total, |i| {
                            outside_work(cfg.outside_cs_work);
                            let vs = buf.take_batch(sizes[i]);
                            if collect_values {
                                mine.extend(vs);
                            }
                            Ok(None)
                        });
                        if collect_values {
                            taken_ref.lock().expect("taken lock").extend(mine.drain(..));
                        }
                        out
                    }));
                }
            }
            Workload::TicketedRw => {
                for _ in 0..cfg.threads {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let Baseline::TicketRw(rw) = backend_ref else { unreachable!() };
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        phases.run(total, |_| {
                            outside_work(cfg.outside_cs_work);
                            rw.start_write();
                            rw.end_write();
                            Ok(None)
                        })
                    }));
                }
                for _ in 0..cfg.threads * cfg.reader_multiplier {
                    let cfg = cfg.clone();
                    handles.push(s.spawn(move || -> WorkerResult {
                        let Baseline::TicketRw(rw) = backend_ref else { unreachable!() };
                        let phases = Phases { warmup: cfg.warmup_ops, barrier: barrier_ref };
                        phases.run(total, |_| {
                            outside_work(cfg.outside_cs_work);
                            rw.start_read();
                            rw.end_read();
                            Ok(None)
                        })
                    }));
                }
            }
        }

        barrier.wait();
        let start = Instant::now();
        for h in handles {
            h.join().expect("worker thread panicked")?;
        }
        Ok(start.elapsed())
    })?;

    let final_snapshot = Some(match &backend {
        Baseline::Buffer(b) => Value::List(b.snapshot()),
        Baseline::List(l) => Value::List(l.snapshot()),
        Baseline::FgList(l) => Value::List(l.snapshot()),
        Baseline::RoundRobin(rr) => Value::Int(rr.snapshot()),
        Baseline::TicketRw(rw) => Value::List(rw.snapshot()),
    });

    Ok(RunOutput {
        wall,
        history: None,
        final_snapshot,
        taken_values: collect_values.then(|| taken.into_inner().expect("taken lock")),
    })
}
