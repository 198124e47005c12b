//! Execution histories: timestamped submit / exec-start / exec-end /
//! await-return records, the raw material for all post-mortem checks.
//!
//! Events are appended to a small set of sharded buffers (one lock per shard,
//! touched only by the recording thread plus the final merge), so recording
//! never orders two application locks against each other and cannot mask
//! races. Timestamps come from a single monotonic clock combined with a
//! Lamport-style atomic so that causally ordered records always carry
//! strictly increasing timestamps, even across threads.
//!
//! The dump format is newline-delimited:
//!
//! ```text
//! ts_ns kind task_id monitor_id thread_id method stage seq
//! ```
//!
//! with `kind` one of `SUB`, `EXS`, `EXE`, `AWT`. `task_id` identifies a
//! method call; the stages of a multi-stage call share it and are told apart
//! by the `stage` field. Argument and return values are carried only by
//! in-memory histories; the dump is purely structural.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use crate::value::Value;

/// Event kind tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Submit,
    ExecStart,
    ExecEnd,
    AwaitReturn,
}

impl EventKind {
    pub fn tag(self) -> &'static str {
        match self {
            EventKind::Submit => "SUB",
            EventKind::ExecStart => "EXS",
            EventKind::ExecEnd => "EXE",
            EventKind::AwaitReturn => "AWT",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "SUB" => EventKind::Submit,
            "EXS" => EventKind::ExecStart,
            "EXE" => EventKind::ExecEnd,
            "AWT" => EventKind::AwaitReturn,
            _ => return None,
        })
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One recorded event.
///
/// `thread_id` is the submitter for `Submit`/`AwaitReturn` and the executor
/// for `ExecStart`/`ExecEnd`. `task_id` is the call id; `seq` is the
/// per-submitter sequence number of the stage the event refers to.
#[derive(Clone, Debug)]
pub struct HistoryEvent {
    pub ts: u64,
    pub kind: EventKind,
    pub task_id: u64,
    pub monitor: u32,
    pub thread_id: u64,
    pub method: Arc<str>,
    pub stage: u32,
    pub seq: u64,
    /// Submission kind, when known (in-memory histories only).
    pub blocking: Option<bool>,
    /// Bound arguments; set on `Submit` events of in-memory histories.
    pub args: Option<Arc<[Value]>>,
    /// Return value; set on the completing `ExecEnd` of in-memory histories.
    pub ret: Option<Value>,
}

impl HistoryEvent {
    fn write_dump_line<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(
            w,
            "{} {} {} {} {} {} {} {}",
            self.ts,
            self.kind.tag(),
            self.task_id,
            self.monitor,
            self.thread_id,
            self.method,
            self.stage,
            self.seq
        )
    }
}

/// A merged, timestamp-ordered event log.
#[derive(Clone, Debug, Default)]
pub struct History {
    events: Vec<HistoryEvent>,
}

impl History {
    pub fn new(mut events: Vec<HistoryEvent>) -> Self {
        events.sort_by_key(|e| (e.ts, e.thread_id));
        History { events }
    }

    pub fn events(&self) -> &[HistoryEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HistoryEvent> {
        self.events.iter()
    }

    /// Writes the newline-delimited dump format.
    pub fn write_dump<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for e in &self.events {
            e.write_dump_line(w)?;
        }
        Ok(())
    }

    pub fn dump_to_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dump(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("dump is ASCII")
    }

    /// Parses the dump format. Value fields and submission kinds are not
    /// present in dumps, so the corresponding event fields are `None`.
    pub fn parse_dump<R: BufRead>(r: R) -> Result<Self, DumpParseError> {
        let mut events = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| DumpParseError {
                line: lineno + 1,
                message: format!("io error: {e}"),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            events.push(parse_line(trimmed).map_err(|message| DumpParseError {
                line: lineno + 1,
                message,
            })?);
        }
        Ok(History::new(events))
    }
}

impl<'a> IntoIterator for &'a History {
    type Item = &'a HistoryEvent;
    type IntoIter = std::slice::Iter<'a, HistoryEvent>;
    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}

fn parse_line(line: &str) -> Result<HistoryEvent, String> {
    let mut parts = line.split_whitespace();
    let mut next = |name: &str| {
        parts
            .next()
            .ok_or_else(|| format!("missing field `{name}`"))
    };
    let ts = next("ts_ns")?
        .parse()
        .map_err(|_| "bad ts_ns".to_string())?;
    let kind_tag = next("kind")?;
    let kind = EventKind::from_tag(kind_tag).ok_or_else(|| format!("bad kind `{kind_tag}`"))?;
    let task_id = next("task_id")?
        .parse()
        .map_err(|_| "bad task_id".to_string())?;
    let monitor = next("monitor_id")?
        .parse()
        .map_err(|_| "bad monitor_id".to_string())?;
    let thread_id = next("thread_id")?
        .parse()
        .map_err(|_| "bad thread_id".to_string())?;
    let method: Arc<str> = Arc::from(next("method")?);
    let stage = next("stage")?
        .parse()
        .map_err(|_| "bad stage".to_string())?;
    let seq = next("seq")?.parse().map_err(|_| "bad seq".to_string())?;
    if parts.next().is_some() {
        return Err("trailing fields".to_string());
    }
    Ok(HistoryEvent {
        ts,
        kind,
        task_id,
        monitor,
        thread_id,
        method,
        stage,
        seq,
        blocking: None,
        args: None,
        ret: None,
    })
}

/// Error from `History::parse_dump`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DumpParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for DumpParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dump line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for DumpParseError {}

const SHARDS: usize = 32;

/// Sharded event sink shared by all runtime threads.
pub(crate) struct Recorder {
    enabled: AtomicBool,
    clock: Instant,
    last_ts: AtomicU64,
    shards: Vec<Mutex<Vec<HistoryEvent>>>,
}

impl Recorder {
    pub(crate) fn new(enabled: bool) -> Self {
        Recorder {
            enabled: AtomicBool::new(enabled),
            clock: Instant::now(),
            last_ts: AtomicU64::new(0),
            shards: (0..SHARDS).map(|_| Mutex::new(Vec::new())).collect(),
        }
    }

    pub(crate) fn enabled(&self) -> bool {
        self.enabled.load(Ordering::Relaxed)
    }

    /// Strictly increasing timestamp near real elapsed nanoseconds. The CAS
    /// loop makes any two causally ordered records carry ordered timestamps.
    fn next_ts(&self) -> u64 {
        let now = self.clock.elapsed().as_nanos() as u64;
        let mut last = self.last_ts.load(Ordering::Relaxed);
        loop {
            let candidate = now.max(last + 1);
            match self.last_ts.compare_exchange_weak(
                last,
                candidate,
                Ordering::AcqRel,
                Ordering::Relaxed,
            ) {
                Ok(_) => return candidate,
                Err(observed) => last = observed,
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn record(
        &self,
        kind: EventKind,
        task_id: u64,
        monitor: u32,
        thread_id: u64,
        method: &Arc<str>,
        stage: u32,
        seq: u64,
        blocking: bool,
        args: Option<Arc<[Value]>>,
        ret: Option<Value>,
    ) {
        if !self.enabled() {
            return;
        }
        let event = HistoryEvent {
            ts: self.next_ts(),
            kind,
            task_id,
            monitor,
            thread_id,
            method: Arc::clone(method),
            stage,
            seq,
            blocking: Some(blocking),
            args,
            ret,
        };
        let shard = (thread_id as usize) % SHARDS;
        self.shards[shard]
            .lock()
            .expect("recorder shard poisoned")
            .push(event);
    }

    /// Drains all shards into a merged history.
    pub(crate) fn drain(&self) -> History {
        let mut all = Vec::new();
        for shard in &self.shards {
            all.append(&mut shard.lock().expect("recorder shard poisoned"));
        }
        History::new(all)
    }
}
