//! Sweep execution: runs a workload across parameter points, repeating each
//! point and summarizing with the trimmed mean.

use std::time::Duration;

use monitor_core::{History, OrderingMode, RuntimeConfig};
use thiserror::Error;
use workloads::{run_active, run_locked, Workload, WorkloadConfig, WorkloadError};

use crate::stats::{Summary, TooFewRuns};

/// Which implementation serves the workload.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImplId {
    ActiveMonitor,
    CoarseLock,
    FineGrained,
}

impl ImplId {
    pub fn id(self) -> &'static str {
        match self {
            ImplId::ActiveMonitor => "am",
            ImplId::CoarseLock => "lock",
            ImplId::FineGrained => "fg",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Some(match id {
            "am" => ImplId::ActiveMonitor,
            "lock" => ImplId::CoarseLock,
            "fg" => ImplId::FineGrained,
            _ => return None,
        })
    }
}

/// Full benchmark request: at most one of the parameter lists may sweep.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub workload: Workload,
    pub impl_id: ImplId,
    pub threads: Vec<usize>,
    pub ops_per_thread: usize,
    pub buffer_size: usize,
    /// `None` entries mean unbounded.
    pub pending_limits: Vec<Option<usize>>,
    pub outside_work: Vec<u64>,
    pub seed: u64,
    pub runs: usize,
    pub warmup_ops: usize,
    pub mode: OrderingMode,
    pub reader_multiplier: usize,
    /// Record and keep the history of the first run of each sweep point.
    pub keep_first_history: bool,
}

impl BenchConfig {
    pub fn new(workload: Workload, impl_id: ImplId) -> Self {
        BenchConfig {
            workload,
            impl_id,
            threads: vec![8],
            ops_per_thread: 20_000,
            buffer_size: 4,
            pending_limits: vec![None],
            outside_work: vec![0],
            seed: 0,
            runs: 5,
            warmup_ops: 1000,
            mode: OrderingMode::Strict,
            reader_multiplier: 5,
            keep_first_history: false,
        }
    }
}

/// One measured sweep point.
#[derive(Debug)]
pub struct SweepPoint {
    pub threads: usize,
    pub param_name: &'static str,
    pub param_value: String,
    pub summary: Summary,
    pub first_history: Option<History>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("bench config error: {0}")]
    Config(String),
    #[error(transparent)]
    TooFewRuns(#[from] TooFewRuns),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
}

enum Param {
    None,
    PendingLimit(Option<usize>),
    OutsideWork(u64),
}

impl Param {
    fn name(&self) -> &'static str {
        match self {
            Param::None => "none",
            Param::PendingLimit(_) => "pending_limit",
            Param::OutsideWork(_) => "outside_work",
        }
    }

    fn value(&self) -> String {
        match self {
            Param::None => "0".to_string(),
            Param::PendingLimit(None) => "unbounded".to_string(),
            Param::PendingLimit(Some(n)) => n.to_string(),
            Param::OutsideWork(n) => n.to_string(),
        }
    }
}

/// Runs the whole sweep: for each point, `runs` timed executions (each with
/// its own warm-up phase) summarized by the trimmed mean. When requested,
/// the first run of a point executes with history recording on and its
/// history is retained for checker hooks; its time still counts (the
/// trimmed mean drops one maximum, absorbing the recording overhead).
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<SweepPoint>, BenchError> {
    if cfg.runs < 3 {
        return Err(BenchError::Config(format!(
            "runs must be >= 3 to survive trimming, got {}",
            cfg.runs
        )));
    }
    if cfg.pending_limits.len() > 1 && cfg.outside_work.len() > 1 {
        return Err(BenchError::Config(
            "sweep either pending-limit or outside-work, not both".into(),
        ));
    }
    if cfg.pending_limits.len() > 1 && cfg.impl_id != ImplId::ActiveMonitor {
        return Err(BenchError::Config(
            "pending-limit sweeps apply only to the monitor implementation".into(),
        ));
    }
    if cfg.impl_id == ImplId::FineGrained && cfg.workload != Workload::SortedList {
        return Err(BenchError::Config(
            "the fine-grained baseline exists only for the sorted list".into(),
        ));
    }

    let mut points = Vec::new();
    for &threads in &cfg.threads {
        let params: Vec<Param> = if cfg.pending_limits.len() > 1 {
            cfg.pending_limits.iter().map(|&l| Param::PendingLimit(l)).collect()
        } else if cfg.outside_work.len() > 1 {
            cfg.outside_work.iter().map(|&w| Param::OutsideWork(w)).collect()
        } else if cfg.pending_limits[0].is_some() {
            vec![Param::PendingLimit(cfg.pending_limits[0])]
        } else if cfg.outside_work[0] != 0 {
            vec![Param::OutsideWork(cfg.outside_work[0])]
        } else {
            vec![Param::None]
        };

        for param in params {
            let mut wcfg = WorkloadConfig::new(cfg.workload, threads, cfg.ops_per_thread)
                .with_seed(cfg.seed);
            wcfg.buffer_size = cfg.buffer_size;
            wcfg.warmup_ops = cfg.warmup_ops;
            wcfg.reader_multiplier = cfg.reader_multiplier;
            wcfg.outside_cs_work = match param {
                Param::OutsideWork(w) => w,
                _ => cfg.outside_work[0],
            };
            let pending_limit = match param {
                Param::PendingLimit(l) => l,
                _ => cfg.pending_limits[0],
            };

            let mut durations: Vec<Duration> = Vec::with_capacity(cfg.runs);
            let mut first_history = None;
            for run in 0..cfg.runs {
                let record = cfg.keep_first_history && run == 0;
                let out = match cfg.impl_id {
                    ImplId::ActiveMonitor => {
                        let rcfg = RuntimeConfig {
                            ordering_mode: cfg.mode,
                            pending_limit,
                            history_recording: record,
                            ..RuntimeConfig::default()
                        };
                        run_active(&wcfg, rcfg)?
                    }
                    ImplId::CoarseLock => run_locked(&wcfg, false, false)?,
                    ImplId::FineGrained => run_locked(&wcfg, true, false)?,
                };
                durations.push(out.wall);
                if record {
                    first_history = out.history;
                }
            }
            points.push(SweepPoint {
                threads,
                param_name: param.name(),
                param_value: param.value(),
                summary: Summary::from_runs(&durations)?,
                first_history,
            });
        }
    }
    Ok(points)
}
