//! End-to-end behavior of the runtime: submission semantics, scheduling,
//! exception policies, pending limits and shutdown.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;
use std::time::Duration;

use monitor_core::{
    AwaitError, EventKind, ExceptionPolicy, HandleStatus, HookDecision, MethodSpec, MonitorRuntime,
    MonitorSpec, RuntimeConfig, ShutdownError, ShutdownMode, Stage, SubmitError, Submitted,
    TaskFailure, Value, WorkerId,
};

struct TestBuffer {
    items: VecDeque<i64>,
    size: usize,
}

fn buffer_spec(name: &str, size: usize) -> MonitorSpec {
    MonitorSpec::new(name, move || TestBuffer {
        items: VecDeque::new(),
        size,
    })
    .method(
        MethodSpec::non_blocking("put").stage(Stage::guarded(
            |s: &TestBuffer, _, _| s.items.len() < s.size,
            |s: &mut TestBuffer, args, _| {
                s.items.push_back(args[0].expect_int());
                Ok(Value::Unit)
            },
        )),
    )
    .method(
        MethodSpec::blocking("take").returns_value().stage(Stage::guarded(
            |s: &TestBuffer, _, _| !s.items.is_empty(),
            |s: &mut TestBuffer, _, _| Ok(Value::Int(s.items.pop_front().expect("non-empty"))),
        )),
    )
    .method(
        MethodSpec::blocking("len").returns_value().stage(Stage::unguarded(
            |s: &mut TestBuffer, _, _| Ok(Value::Int(s.items.len() as i64)),
        )),
    )
}

fn recording_config() -> RuntimeConfig {
    RuntimeConfig::default().with_recording()
}

#[test]
fn one_executor_serves_many_monitors() {
    let specs = (0..5).map(|i| buffer_spec(&format!("buf{i}"), 2)).collect();
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), specs).unwrap();
    assert_eq!(rt.executor_count(), 1);
    assert!(rt.assignment().iter().all(|(_, exec)| *exec == 0));
    // All five monitors still work through the single executor.
    let mut w = rt.worker(WorkerId(1));
    for i in 0..5 {
        let m = rt.monitor_id(&format!("buf{i}")).unwrap();
        w.call(m, "put", vec![Value::Int(i as i64)]).unwrap();
        assert_eq!(w.call(m, "take", vec![]).unwrap(), Value::Int(i as i64));
    }
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn executors_never_exceed_monitor_count() {
    let cfg = RuntimeConfig {
        max_monitor_threads: 8,
        ..RuntimeConfig::default()
    };
    let rt = MonitorRuntime::start(cfg, vec![buffer_spec("only", 1)]).unwrap();
    assert_eq!(rt.executor_count(), 1);
}

#[test]
fn static_assignment_covers_all_monitors() {
    let cfg = RuntimeConfig {
        max_monitor_threads: 2,
        ..RuntimeConfig::default()
    };
    let specs = (0..3).map(|i| buffer_spec(&format!("m{i}"), 1)).collect();
    let rt = MonitorRuntime::start(cfg, specs).unwrap();
    assert_eq!(rt.executor_count(), 2);
    let assignment = rt.assignment();
    assert_eq!(assignment.len(), 3);
    for (_, exec) in assignment {
        assert!(exec < 2);
    }
}

#[test]
fn nonblocking_put_returns_handle_and_completes_async() {
    let mut rt = MonitorRuntime::start(recording_config(), vec![buffer_spec("b", 4)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let mut w = rt.worker(WorkerId(1));
    let handle = w
        .submit(m, "put", vec![Value::Int(42)])
        .unwrap()
        .into_handle();
    handle.await_result(Some(Duration::from_secs(5))).unwrap();
    assert_eq!(w.call(m, "len", vec![]).unwrap(), Value::Int(1));
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn blocking_take_waits_for_put() {
    let rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 4)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    std::thread::scope(|s| {
        let consumer = s.spawn(|| {
            let mut w = rt.worker(WorkerId(1));
            w.call(m, "take", vec![])
        });
        std::thread::sleep(Duration::from_millis(50));
        assert!(!consumer.is_finished(), "take on empty buffer must suspend");
        let mut producer = rt.worker(WorkerId(2));
        producer.submit(m, "put", vec![Value::Int(7)]).unwrap();
        assert_eq!(consumer.join().unwrap().unwrap(), Value::Int(7));
    });
}

#[test]
fn awaited_put_is_visible_to_take() {
    // Sequential oracle: after an awaited put(v), a take must return v.
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 1)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let mut w = rt.worker(WorkerId(1));
    let h = w.submit(m, "put", vec![Value::Int(5)]).unwrap().into_handle();
    h.await_result(Some(Duration::from_secs(5))).unwrap();
    assert_eq!(w.call(m, "take", vec![]).unwrap(), Value::Int(5));
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn await_on_completed_handle_is_immediate() {
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 4)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let mut w = rt.worker(WorkerId(1));
    let h = w.submit(m, "put", vec![Value::Int(1)]).unwrap().into_handle();
    h.await_result(Some(Duration::from_secs(5))).unwrap();
    // Second await returns instantly with the stored value.
    assert_eq!(h.await_result(Some(Duration::from_millis(1))).unwrap(), Value::Unit);
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn await_times_out_on_permanently_blocked_task() {
    let rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 1)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let mut w = rt.worker(WorkerId(1));
    // Fill the buffer, then a second put can never run (no consumer).
    w.submit(m, "put", vec![Value::Int(1)]).unwrap();
    let blocked = w.submit(m, "put", vec![Value::Int(2)]).unwrap().into_handle();
    let err = blocked
        .await_result(Some(Duration::from_millis(80)))
        .unwrap_err();
    assert_eq!(err, AwaitError::Timeout);
}

#[test]
fn pending_limit_zero_degenerates_to_blocking() {
    let cfg = RuntimeConfig {
        pending_limit: Some(0),
        history_recording: true,
        ..RuntimeConfig::default()
    };
    let mut rt = MonitorRuntime::start(cfg, vec![buffer_spec("b", 4)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let mut w = rt.worker(WorkerId(1));
    // A non-blocking put now returns the value directly, after completion.
    match w.submit(m, "put", vec![Value::Int(9)]).unwrap() {
        Submitted::Value(v) => assert_eq!(v, Value::Unit),
        Submitted::Handle(_) => panic!("pending_limit=0 must behave like a blocking call"),
    }
    assert_eq!(w.call(m, "len", vec![]).unwrap(), Value::Int(1));
    rt.shutdown(ShutdownMode::Drain).unwrap();
    // The degenerate submission completed before the submitter resumed.
    let history = rt.take_history();
    let sub_ts = history
        .iter()
        .find(|e| e.kind == EventKind::Submit && &*e.method == "put")
        .unwrap()
        .ts;
    let exe_ts = history
        .iter()
        .find(|e| e.kind == EventKind::ExecEnd && &*e.method == "put")
        .unwrap()
        .ts;
    let len_sub_ts = history
        .iter()
        .find(|e| e.kind == EventKind::Submit && &*e.method == "len")
        .unwrap()
        .ts;
    assert!(sub_ts < exe_ts && exe_ts < len_sub_ts);
}

#[test]
fn pending_limit_suspends_submitter_until_slot_frees() {
    let cfg = RuntimeConfig {
        pending_limit: Some(2),
        ..RuntimeConfig::default()
    };
    let rt = MonitorRuntime::start(cfg, vec![buffer_spec("b", 1)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    std::thread::scope(|s| {
        let producer = s.spawn(|| {
            let mut w = rt.worker(WorkerId(1));
            // Buffer size 1: put(0) fills the buffer, puts 1 and 2 stay
            // enqueued-incomplete forever, so the fourth submission must
            // block on the limit of 2 regardless of executor timing.
            for i in 0..4 {
                w.submit(m, "put", vec![Value::Int(i)]).unwrap();
            }
        });
        std::thread::sleep(Duration::from_millis(100));
        assert!(
            !producer.is_finished(),
            "fourth submission must block on the pending limit"
        );
        let mut consumer = rt.worker(WorkerId(2));
        assert_eq!(consumer.call(m, "take", vec![]).unwrap(), Value::Int(0));
        producer.join().unwrap();
    });
}

#[test]
fn automatic_signaling_wakes_parked_put() {
    // Fill the buffer; a pending put becomes executable as soon as a take
    // completes, with no explicit notify anywhere.
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 1)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let mut w = rt.worker(WorkerId(1));
    w.submit(m, "put", vec![Value::Int(1)]).unwrap();
    let pending = w.submit(m, "put", vec![Value::Int(2)]).unwrap().into_handle();
    assert!(!pending.is_settled());
    // The frees-up-space take comes from another worker: within one lane a
    // later take could never overtake this worker's pending put.
    let mut taker = rt.worker(WorkerId(2));
    assert_eq!(taker.call(m, "take", vec![]).unwrap(), Value::Int(1));
    pending.await_result(Some(Duration::from_secs(5))).unwrap();
    assert_eq!(taker.call(m, "take", vec![]).unwrap(), Value::Int(2));
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn idle_executor_parks_instead_of_spinning() {
    let rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 1)]).unwrap();
    let mut w = rt.worker(WorkerId(1));
    let m = rt.monitor_id("b").unwrap();
    w.call(m, "put", vec![Value::Int(1)]).unwrap();
    std::thread::sleep(Duration::from_millis(50));
    let before = rt.stats().executor_sweeps[0];
    std::thread::sleep(Duration::from_millis(200));
    let after = rt.stats().executor_sweeps[0];
    assert!(
        after - before <= 2,
        "idle executor polled {} times in 200ms",
        after - before
    );
}

#[test]
fn two_monitors_on_one_executor_both_progress() {
    let specs = vec![buffer_spec("a", 8), buffer_spec("b", 8)];
    let mut rt = MonitorRuntime::start(RuntimeConfig::default().relaxed(), specs).unwrap();
    assert_eq!(rt.executor_count(), 1);
    let (ma, mb) = (rt.monitor_id("a").unwrap(), rt.monitor_id("b").unwrap());
    let mut w = rt.worker(WorkerId(1));
    let ha = w.submit(ma, "put", vec![Value::Int(1)]).unwrap().into_handle();
    let hb = w.submit(mb, "put", vec![Value::Int(2)]).unwrap().into_handle();
    ha.await_result(Some(Duration::from_secs(5))).unwrap();
    hb.await_result(Some(Duration::from_secs(5))).unwrap();
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

struct Flaky;

fn flaky_spec(fail_times: u32, two_stage: bool) -> (MonitorSpec, Arc<AtomicU32>) {
    let calls = Arc::new(AtomicU32::new(0));
    let calls_cl = Arc::clone(&calls);
    let mut first = MethodSpec::non_blocking("work").stage(Stage::unguarded(
        move |_: &mut Flaky, _, _| {
            let n = calls_cl.fetch_add(1, Ordering::SeqCst);
            if n < fail_times {
                Err("induced failure".into())
            } else {
                Ok(Value::Int(n as i64))
            }
        },
    ));
    if two_stage {
        first = first.stage(Stage::unguarded(|_: &mut Flaky, _, _| Ok(Value::Int(99))));
    }
    (MonitorSpec::new("flaky", || Flaky).method(first), calls)
}

#[test]
fn retry_policy_reexecutes_until_success() {
    let (spec, _) = flaky_spec(2, false);
    let cfg = RuntimeConfig {
        exception_policy: ExceptionPolicy::Retry(3),
        ..RuntimeConfig::default()
    };
    let mut rt = MonitorRuntime::start(cfg, vec![spec]).unwrap();
    let m = rt.monitor_id("flaky").unwrap();
    let mut w = rt.worker(WorkerId(1));
    let h = w.submit(m, "work", vec![]).unwrap().into_handle();
    let v = h.await_result(Some(Duration::from_secs(5))).unwrap();
    assert_eq!(v, Value::Int(2));
    assert_eq!(h.attempts(), 3);
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn retry_budget_of_one_fails_after_single_attempt() {
    let (spec, calls) = flaky_spec(u32::MAX, false);
    let cfg = RuntimeConfig {
        exception_policy: ExceptionPolicy::Retry(1),
        ..RuntimeConfig::default()
    };
    let mut rt = MonitorRuntime::start(cfg, vec![spec]).unwrap();
    let m = rt.monitor_id("flaky").unwrap();
    let mut w = rt.worker(WorkerId(1));
    let h = w.submit(m, "work", vec![]).unwrap().into_handle();
    let err = h.await_result(Some(Duration::from_secs(5))).unwrap_err();
    match err {
        AwaitError::Task(TaskFailure::Body { attempts, .. }) => assert_eq!(attempts, 1),
        other => panic!("unexpected: {other:?}"),
    }
    assert_eq!(calls.load(Ordering::SeqCst), 1);
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn ignore_policy_cancels_successor_stages() {
    let (spec, calls) = flaky_spec(u32::MAX, true);
    let cfg = RuntimeConfig {
        history_recording: true,
        exception_policy: ExceptionPolicy::Ignore,
        ..RuntimeConfig::default()
    };
    let mut rt = MonitorRuntime::start(cfg, vec![spec]).unwrap();
    let m = rt.monitor_id("flaky").unwrap();
    let mut w = rt.worker(WorkerId(1));
    let h = w.submit(m, "work", vec![]).unwrap().into_handle();
    let err = h.await_result(Some(Duration::from_secs(5))).unwrap_err();
    assert!(matches!(err, AwaitError::Task(TaskFailure::Body { .. })));
    assert_eq!(calls.load(Ordering::SeqCst), 1);
    rt.shutdown(ShutdownMode::Drain).unwrap();
    // Stage 1 never started: no exec events for stage index 1.
    let history = rt.take_history();
    assert!(history
        .iter()
        .all(|e| !(e.kind == EventKind::ExecStart && e.stage == 1)));
}

#[test]
fn hook_policy_can_substitute_a_value() {
    let (spec, _) = flaky_spec(u32::MAX, false);
    let cfg = RuntimeConfig {
        exception_policy: ExceptionPolicy::Hook(Arc::new(|ctx| {
            if ctx.attempts < 2 {
                HookDecision::Retry
            } else {
                HookDecision::Substitute(Value::Int(-1))
            }
        })),
        ..RuntimeConfig::default()
    };
    let mut rt = MonitorRuntime::start(cfg, vec![spec]).unwrap();
    let m = rt.monitor_id("flaky").unwrap();
    let mut w = rt.worker(WorkerId(1));
    let h = w.submit(m, "work", vec![]).unwrap().into_handle();
    assert_eq!(
        h.await_result(Some(Duration::from_secs(5))).unwrap(),
        Value::Int(-1)
    );
    assert_eq!(h.attempts(), 2);
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn drain_with_empty_lanes_is_clean() {
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 2)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let mut w = rt.worker(WorkerId(1));
    w.call(m, "put", vec![Value::Int(1)]).unwrap();
    assert_eq!(w.call(m, "take", vec![]).unwrap(), Value::Int(1));
    assert_eq!(rt.shutdown(ShutdownMode::Drain), Ok(()));
}

#[test]
fn drain_reports_stranded_take() {
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 2)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let handle = std::thread::scope(|s| {
        let consumer = s.spawn(|| {
            let mut w = rt.worker(WorkerId(1));
            w.call(m, "take", vec![])
        });
        std::thread::sleep(Duration::from_millis(50));
        let result = rt.shutdown(ShutdownMode::Drain);
        let err = consumer.join().unwrap().unwrap_err();
        assert_eq!(err, SubmitError::Task(TaskFailure::Stranded));
        result
    });
    match handle {
        Err(ShutdownError::Stranded(ids)) => assert_eq!(ids.len(), 1),
        other => panic!("expected stranded report, got {other:?}"),
    }
}

#[test]
fn abort_fails_pending_handles() {
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 1)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let mut w = rt.worker(WorkerId(1));
    w.submit(m, "put", vec![Value::Int(1)]).unwrap();
    let pending = w.submit(m, "put", vec![Value::Int(2)]).unwrap().into_handle();
    rt.shutdown(ShutdownMode::Abort).unwrap();
    assert_eq!(
        pending.status(),
        HandleStatus::Failed(TaskFailure::Shutdown)
    );
    // New submissions are refused.
    let err = w.submit(m, "put", vec![Value::Int(3)]).unwrap_err();
    assert_eq!(err, SubmitError::RuntimeShutDown);
}

#[test]
fn unknown_monitor_and_method_are_rejected() {
    let rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 1)]).unwrap();
    let mut w = rt.worker(WorkerId(1));
    assert!(matches!(
        w.submit(monitor_core::MonitorId(9), "put", vec![]),
        Err(SubmitError::MonitorUnknown(9))
    ));
    let m = rt.monitor_id("b").unwrap();
    assert!(matches!(
        w.submit(m, "nope", vec![]),
        Err(SubmitError::MethodUnknown { .. })
    ));
}

#[test]
fn precondition_purity_violation_is_detected() {
    use std::cell::Cell;
    struct Sneaky {
        counter: Cell<i64>,
    }
    let spec = MonitorSpec::new("sneaky", || Sneaky {
        counter: Cell::new(0),
    })
    .with_fingerprint(|s: &Sneaky| s.counter.get() as u64)
    .method(MethodSpec::non_blocking("probe").stage(Stage::guarded(
        |s: &Sneaky, _, _| {
            // A precondition must not mutate state; this one does.
            s.counter.set(s.counter.get() + 1);
            true
        },
        |_: &mut Sneaky, _, _| Ok(Value::Unit),
    )));
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), vec![spec]).unwrap();
    let m = rt.monitor_id("sneaky").unwrap();
    let mut w = rt.worker(WorkerId(1));
    w.call(m, "probe", vec![]).unwrap();
    assert!(rt.stats().purity_violations > 0);
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn pure_precondition_passes_fingerprint_check() {
    let spec = MonitorSpec::new("clean", || TestBuffer {
        items: VecDeque::new(),
        size: 2,
    })
    .with_fingerprint(|s: &TestBuffer| s.items.iter().map(|v| *v as u64).sum::<u64>() ^ (s.items.len() as u64) << 32)
    .method(MethodSpec::non_blocking("put").stage(Stage::guarded(
        |s: &TestBuffer, _, _| s.items.len() < s.size,
        |s: &mut TestBuffer, args, _| {
            s.items.push_back(args[0].expect_int());
            Ok(Value::Unit)
        },
    )));
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), vec![spec]).unwrap();
    let m = rt.monitor_id("clean").unwrap();
    let mut w = rt.worker(WorkerId(1));
    w.call(m, "put", vec![Value::Int(3)]).unwrap();
    assert_eq!(rt.stats().purity_violations, 0);
    rt.shutdown(ShutdownMode::Drain).unwrap();
}

#[test]
fn stage_chaining_orders_exec_events() {
    // Two-stage call: stage 1 must never start before stage 0 ends.
    struct Gate {
        open: bool,
    }
    let spec = MonitorSpec::new("gate", || Gate { open: false })
        .method(
            MethodSpec::blocking("pass")
                .stage(Stage::unguarded(|s: &mut Gate, _, _| {
                    s.open = true;
                    Ok(Value::Unit)
                }))
                .stage(Stage::guarded(
                    |s: &Gate, _, _| s.open,
                    |s: &mut Gate, _, _| {
                        s.open = false;
                        Ok(Value::Int(1))
                    },
                )),
        );
    let mut rt = MonitorRuntime::start(recording_config(), vec![spec]).unwrap();
    let m = rt.monitor_id("gate").unwrap();
    let mut w = rt.worker(WorkerId(1));
    assert_eq!(w.call(m, "pass", vec![]).unwrap(), Value::Int(1));
    rt.shutdown(ShutdownMode::Drain).unwrap();
    let history = rt.take_history();
    let stage0_end = history
        .iter()
        .find(|e| e.kind == EventKind::ExecEnd && e.stage == 0)
        .unwrap()
        .ts;
    let stage1_start = history
        .iter()
        .find(|e| e.kind == EventKind::ExecStart && e.stage == 1)
        .unwrap()
        .ts;
    assert!(stage0_end < stage1_start);
}

#[test]
fn pending_limit_is_never_exceeded() {
    // History scan: at no instant do more than `limit` non-blocking calls
    // sit between submission and completion.
    let limit = 3;
    let cfg = RuntimeConfig {
        pending_limit: Some(limit),
        history_recording: true,
        ..RuntimeConfig::default()
    };
    let mut rt = MonitorRuntime::start(cfg, vec![buffer_spec("b", 2)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    std::thread::scope(|s| {
        for p in 0..3u64 {
            let rt = &rt;
            s.spawn(move || {
                let mut w = rt.worker(WorkerId(p));
                for i in 0..40 {
                    w.submit(m, "put", vec![Value::Int(i)]).unwrap();
                }
            });
        }
        let rt = &rt;
        s.spawn(move || {
            let mut w = rt.worker(WorkerId(100));
            for _ in 0..120 {
                w.call(m, "take", vec![]).unwrap();
            }
        });
    });
    rt.shutdown(ShutdownMode::Drain).unwrap();
    let history = rt.take_history();
    let mut outstanding = 0i64;
    let mut peak = 0i64;
    for e in &history {
        if e.blocking == Some(true) {
            continue;
        }
        match e.kind {
            EventKind::Submit => {
                outstanding += 1;
                peak = peak.max(outstanding);
            }
            EventKind::ExecEnd if e.stage == 0 => outstanding -= 1,
            _ => {}
        }
    }
    assert!(
        peak as usize <= limit,
        "observed {peak} pending non-blocking calls with limit {limit}"
    );
}

#[test]
fn signaling_liveness_under_idle_system() {
    // Once the precondition becomes (and stays) true, the task runs without
    // any further stimulus.
    let mut rt = MonitorRuntime::start(RuntimeConfig::default(), vec![buffer_spec("b", 1)]).unwrap();
    let m = rt.monitor_id("b").unwrap();
    let mut w = rt.worker(WorkerId(1));
    w.submit(m, "put", vec![Value::Int(1)]).unwrap();
    let pending = w.submit(m, "put", vec![Value::Int(2)]).unwrap().into_handle();
    let mut taker = rt.worker(WorkerId(2));
    taker.call(m, "take", vec![]).unwrap();
    // No more submissions from here on; the pending put must still complete.
    pending
        .await_result(Some(Duration::from_secs(2)))
        .expect("pending put must run once space is available");
    rt.shutdown(ShutdownMode::Drain).unwrap();
}
