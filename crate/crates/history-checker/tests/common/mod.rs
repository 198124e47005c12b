//! Shared fixtures: hand-built history events and small runtime workloads.

use std::collections::VecDeque;
use std::sync::Arc;

use monitor_core::history::{EventKind, History, HistoryEvent};
use monitor_core::{MethodSpec, MonitorSpec, Stage, Value};

pub fn ev(
    ts: u64,
    kind: EventKind,
    task_id: u64,
    monitor: u32,
    thread_id: u64,
    method: &str,
    stage: u32,
    seq: u64,
) -> HistoryEvent {
    HistoryEvent {
        ts,
        kind,
        task_id,
        monitor,
        thread_id,
        method: Arc::from(method),
        stage,
        seq,
        blocking: Some(false),
        args: None,
        ret: None,
    }
}

pub fn with_args(mut e: HistoryEvent, args: Vec<Value>) -> HistoryEvent {
    e.args = Some(Arc::from(args));
    e
}

pub fn with_ret(mut e: HistoryEvent, ret: Value) -> HistoryEvent {
    e.ret = Some(ret);
    e
}

pub fn blocking(mut e: HistoryEvent) -> HistoryEvent {
    e.blocking = Some(true);
    e
}

/// A complete single-stage call: submit, exec-start, completing exec-end.
#[allow(clippy::too_many_arguments)]
pub fn call_events(
    base_ts: u64,
    task_id: u64,
    monitor: u32,
    submitter: u64,
    executor: u64,
    method: &str,
    seq: u64,
    args: Vec<Value>,
    ret: Value,
) -> Vec<HistoryEvent> {
    vec![
        with_args(
            ev(base_ts, EventKind::Submit, task_id, monitor, submitter, method, 0, seq),
            args,
        ),
        ev(
            base_ts + 1,
            EventKind::ExecStart,
            task_id,
            monitor,
            executor,
            method,
            0,
            seq,
        ),
        with_ret(
            ev(
                base_ts + 2,
                EventKind::ExecEnd,
                task_id,
                monitor,
                executor,
                method,
                0,
                seq,
            ),
            ret,
        ),
    ]
}

pub fn history(events: Vec<HistoryEvent>) -> History {
    History::new(events)
}

pub struct Buffer {
    items: VecDeque<i64>,
    size: usize,
}

/// Bounded-buffer monitor: non-blocking guarded `put`, blocking `take`.
pub fn buffer_spec(name: &str, size: usize) -> MonitorSpec {
    MonitorSpec::new(name, move || Buffer {
        items: VecDeque::new(),
        size,
    })
    .method(
        MethodSpec::non_blocking("put").stage(Stage::guarded(
            |s: &Buffer, _, _| s.items.len() < s.size,
            |s: &mut Buffer, args, _| {
                s.items.push_back(args[0].expect_int());
                Ok(Value::Unit)
            },
        )),
    )
    .method(
        MethodSpec::blocking("take").returns_value().stage(Stage::guarded(
            |s: &Buffer, _, _| !s.items.is_empty(),
            |s: &mut Buffer, _, _| Ok(Value::Int(s.items.pop_front().expect("non-empty"))),
        )),
    )
}

/// Two-monitor workload where each worker alternates non-blocking calls on
/// a big buffer and a list, awaiting at random points. Every prefix of a
/// worker's stream has takes <= puts, which guarantees progress.
pub fn two_monitor_run(
    seed: u64,
    mode: monitor_core::OrderingMode,
) -> monitor_core::History {
    use monitor_core::{MonitorRuntime, RuntimeConfig, ShutdownMode, WorkerId};
    use rand::{Rng, SeedableRng};

    let n_workers = 2 + (seed % 3) as usize;
    let ops = 8 + (seed % 12) as usize;
    let cfg = RuntimeConfig {
        ordering_mode: mode,
        history_recording: true,
        max_monitor_threads: 1 + (seed % 2) as usize,
        ..RuntimeConfig::default()
    };
    let rt =
        MonitorRuntime::start(cfg, vec![buffer_spec("buf", 1024), list_spec("list")]).unwrap();
    let buf = rt.monitor_id("buf").unwrap();
    let list = rt.monitor_id("list").unwrap();
    std::thread::scope(|s| {
        let rt = &rt;
        for w in 0..n_workers {
            s.spawn(move || {
                let mut sess = rt.worker(WorkerId(w as u64));
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed * 77 + w as u64);
                let mut credit = 0u32;
                let mut last = None;
                for i in 0..ops {
                    match rng.gen_range(0..4) {
                        0 => {
                            sess.submit(buf, "put", vec![Value::Int(i as i64)]).unwrap();
                            credit += 1;
                        }
                        1 => {
                            let h = sess
                                .submit(list, "insert", vec![Value::Int(rng.gen_range(0..50))])
                                .unwrap()
                                .into_handle();
                            last = Some(h);
                        }
                        2 if credit > 0 => {
                            sess.call(buf, "take", vec![]).unwrap();
                            credit -= 1;
                        }
                        _ => {
                            if let Some(h) = last.take() {
                                h.await_result(None).unwrap();
                            }
                        }
                    }
                }
                for _ in 0..credit {
                    sess.call(buf, "take", vec![]).unwrap();
                }
            });
        }
    });
    rt.shutdown(ShutdownMode::Drain).unwrap();
    rt.take_history()
}

/// Unguarded sorted-list monitor: non-blocking `insert` and `remove`.
pub fn list_spec(name: &str) -> MonitorSpec {
    MonitorSpec::new(name, Vec::<i64>::new)
        .method(
            MethodSpec::non_blocking("insert").stage(Stage::unguarded(
                |s: &mut Vec<i64>, args: &[Value], _| {
                    let v = args[0].expect_int();
                    let pos = s.partition_point(|&x| x < v);
                    s.insert(pos, v);
                    Ok(Value::Unit)
                },
            )),
        )
        .method(
            MethodSpec::non_blocking("remove").stage(Stage::unguarded(
                |s: &mut Vec<i64>, args: &[Value], _| {
                    let v = args[0].expect_int();
                    if let Ok(pos) = s.binary_search(&v) {
                        s.remove(pos);
                    }
                    Ok(Value::Unit)
                },
            )),
        )
}
