//! Monitor definitions for the five benchmark workloads.
//!
//! Every monitor also exposes a blocking `snapshot` method so drivers can
//! read the final state for oracle comparisons; the sequential models accept
//! it at any point.

use monitor_core::{MethodSpec, MonitorSpec, Stage, Value};

use crate::error::WorkloadError;
use crate::states::{BufferState, ListState, RRState, TicketState};
use crate::streams::prepopulated_list_values;

/// Bounded buffer: non-blocking guarded `put(v)`, blocking `take() -> v`.
pub fn build_bounded_buffer(size: usize) -> Result<MonitorSpec, WorkloadError> {
    if size < 1 {
        return Err(WorkloadError::Config(
            "bounded buffer size must be >= 1".into(),
        ));
    }
    Ok(MonitorSpec::new("bounded_buffer", move || BufferState::new(size))
        .method(
            MethodSpec::non_blocking("put").stage(Stage::guarded(
                |s: &BufferState, _, _| s.item_count < s.size,
                |s: &mut BufferState, args, _| {
                    s.put(args[0].expect_int());
                    Ok(Value::Unit)
                },
            )),
        )
        .method(
            MethodSpec::blocking("take").returns_value().stage(Stage::guarded(
                |s: &BufferState, _, _| s.item_count > 0,
                |s: &mut BufferState, _, _| Ok(Value::Int(s.take())),
            )),
        )
        .method(
            MethodSpec::blocking("snapshot").returns_value().stage(Stage::unguarded(
                |s: &mut BufferState, _, _| Ok(Value::List(s.fifo_contents())),
            )),
        ))
}

/// Sorted linked list: non-blocking unguarded `insert(v)` and `remove(v)`,
/// pre-populated with `prepopulate` seeded integers.
pub fn build_sorted_list(seed: u64, prepopulate: usize) -> MonitorSpec {
    MonitorSpec::new("sorted_list", move || {
        ListState::from_values(prepopulated_list_values(seed, prepopulate))
    })
    .method(
        MethodSpec::non_blocking("insert").stage(Stage::unguarded(
            |s: &mut ListState, args, _| {
                s.insert(args[0].expect_int());
                Ok(Value::Unit)
            },
        )),
    )
    .method(
        MethodSpec::non_blocking("remove").stage(Stage::unguarded(
            |s: &mut ListState, args, _| {
                s.remove(args[0].expect_int());
                Ok(Value::Unit)
            },
        )),
    )
    .method(
        MethodSpec::blocking("snapshot").returns_value().stage(Stage::unguarded(
            |s: &mut ListState, _, _| Ok(Value::List(s.to_vec())),
        )),
    )
}

/// Round-robin critical-section access: non-blocking `enter(my_id)` guarded
/// by `turn == my_id`; the body passes the turn on.
pub fn build_round_robin(n_threads: usize) -> Result<MonitorSpec, WorkloadError> {
    if n_threads < 2 {
        return Err(WorkloadError::Config(
            "round-robin needs at least 2 threads".into(),
        ));
    }
    let n = n_threads as i64;
    Ok(MonitorSpec::new("round_robin", move || RRState::new(n))
        .method(
            MethodSpec::non_blocking("enter").stage(Stage::guarded(
                |s: &RRState, args: &[Value], _| s.turn == args[0].expect_int(),
                |s: &mut RRState, _, _| {
                    s.turn = (s.turn + 1) % s.n_threads;
                    Ok(Value::Unit)
                },
            )),
        )
        .method(
            MethodSpec::blocking("snapshot").returns_value().stage(Stage::unguarded(
                |s: &mut RRState, _, _| Ok(Value::Int(s.turn)),
            )),
        ))
}

/// Parametrized bounded buffer: non-blocking `put_batch(items)` guarded on
/// space for the whole batch, blocking `take_batch(k) -> items` guarded on
/// `k` available items. Batches are all-or-nothing single task bodies.
pub fn build_parametrized_buffer(size: usize) -> Result<MonitorSpec, WorkloadError> {
    if size < 1 {
        return Err(WorkloadError::Config(
            "parametrized buffer size must be >= 1".into(),
        ));
    }
    Ok(MonitorSpec::new("param_buffer", move || BufferState::new(size))
        .method(
            MethodSpec::non_blocking("put_batch").stage(Stage::guarded(
                |s: &BufferState, args: &[Value], _| s.fits(args[0].expect_list().len()),
                |s: &mut BufferState, args, _| {
                    for &v in args[0].expect_list() {
                        s.put(v);
                    }
                    Ok(Value::Unit)
                },
            )),
        )
        .method(
            MethodSpec::blocking("take_batch").returns_value().stage(Stage::guarded(
                |s: &BufferState, args: &[Value], _| s.item_count >= args[0].expect_int() as usize,
                |s: &mut BufferState, args, _| {
                    let k = args[0].expect_int() as usize;
                    Ok(Value::List((0..k).map(|_| s.take()).collect()))
                },
            )),
        )
        .method(
            MethodSpec::blocking("snapshot").returns_value().stage(Stage::unguarded(
                |s: &mut BufferState, _, _| Ok(Value::List(s.fifo_contents())),
            )),
        ))
}

/// Ticketed readers/writers. Arrival methods are blocking and split into two
/// tasks: the first takes a ticket unconditionally (into the call's scratch),
/// the second waits for that ticket to be served. Exit methods are
/// non-blocking single tasks. The critical sections carry no computation;
/// only the counters move.
pub fn build_ticketed_rw() -> MonitorSpec {
    MonitorSpec::new("ticketed_rw", TicketState::default)
        .method(
            MethodSpec::blocking("startRead")
                .stage(Stage::unguarded(|s: &mut TicketState, _, scratch| {
                    scratch.set("ticket", s.ticket);
                    s.ticket += 1;
                    Ok(Value::Unit)
                }))
                .stage(Stage::guarded(
                    |s: &TicketState, _, scratch| s.serving == scratch.expect_int("ticket"),
                    |s: &mut TicketState, _, _| {
                        s.rcnt += 1;
                        s.serving += 1;
                        Ok(Value::Unit)
                    },
                )),
        )
        .method(
            MethodSpec::non_blocking("endRead").stage(Stage::unguarded(
                |s: &mut TicketState, _, _| {
                    s.rcnt -= 1;
                    Ok(Value::Unit)
                },
            )),
        )
        .method(
            MethodSpec::blocking("startWrite")
                .stage(Stage::unguarded(|s: &mut TicketState, _, scratch| {
                    scratch.set("ticket", s.ticket);
                    s.ticket += 1;
                    Ok(Value::Unit)
                }))
                // The writer only waits; serving advances in endWrite.
                .stage(Stage::barrier(|s: &TicketState, _, scratch| {
                    s.serving == scratch.expect_int("ticket") && s.rcnt == 0
                })),
        )
        .method(
            MethodSpec::non_blocking("endWrite").stage(Stage::unguarded(
                |s: &mut TicketState, _, _| {
                    s.serving += 1;
                    Ok(Value::Unit)
                },
            )),
        )
        .method(
            MethodSpec::blocking("snapshot").returns_value().stage(Stage::unguarded(
                |s: &mut TicketState, _, _| {
                    Ok(Value::List(vec![s.ticket, s.serving, s.rcnt]))
                },
            )),
        )
}
