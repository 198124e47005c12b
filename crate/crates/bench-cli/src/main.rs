//! Benchmark harness: runs one workload over a parameter sweep and reports
//! trimmed-mean runtimes, optionally as CSV and with a history dump of the
//! first run.

mod bench;
mod csv;
mod stats;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use monitor_core::OrderingMode;
use workloads::Workload;

use bench::{run_bench, BenchConfig, BenchError, ImplId};
use csv::CsvRow;

#[derive(Parser, Debug)]
#[command(
    name = "am-bench",
    about = "Monitor workload benchmarks with trimmed-mean statistics"
)]
struct Cli {
    /// Workload: bb, sll, rr, pbb or trw.
    #[arg(long)]
    workload: String,
    /// Implementation: am (monitor runtime), lock (coarse), fg (fine-grained list).
    #[arg(long = "impl", default_value = "am")]
    impl_id: String,
    /// Thread counts, comma separated (pairs for bb/pbb, writers for trw).
    #[arg(long, default_value = "8", value_delimiter = ',')]
    threads: Vec<usize>,
    /// Operations per thread in the timed phase.
    #[arg(long, default_value_t = 20_000)]
    ops: usize,
    #[arg(long = "buffer-size", default_value_t = 4)]
    buffer_size: usize,
    /// Pending-limit sweep: integers or `unbounded`, comma separated.
    #[arg(long = "pending-limit", default_value = "unbounded", value_delimiter = ',')]
    pending_limit: Vec<String>,
    /// Outside-critical-section work sweep (integer additions per call).
    #[arg(long = "outside-work", default_value = "0", value_delimiter = ',')]
    outside_work: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Timed repetitions per sweep point (>= 3; the paper-scale count is 25).
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Warm-up operations per thread, excluded from timing.
    #[arg(long, default_value_t = 1000)]
    warmup: usize,
    /// Ordering mode: strict or relaxed.
    #[arg(long, default_value = "strict")]
    mode: String,
    /// Write results as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Record the first run of each sweep point and dump its history here.
    #[arg(long = "dump-history")]
    dump_history: Option<PathBuf>,
}

fn build_config(cli: &Cli) -> Result<BenchConfig, String> {
    let workload = Workload::from_id(&cli.workload)
        .ok_or_else(|| format!("unknown workload `{}` (bb|sll|rr|pbb|trw)", cli.workload))?;
    let impl_id = ImplId::from_id(&cli.impl_id)
        .ok_or_else(|| format!("unknown impl `{}` (am|lock|fg)", cli.impl_id))?;
    let mode = match cli.mode.as_str() {
        "strict" => OrderingMode::Strict,
        "relaxed" => OrderingMode::Relaxed,
        other => return Err(format!("unknown mode `{other}` (strict|relaxed)")),
    };
    let mut pending_limits = Vec::new();
    for raw in &cli.pending_limit {
        pending_limits.push(match raw.as_str() {
            "unbounded" | "none" => None,
            n => Some(
                n.parse::<usize>()
                    .map_err(|_| format!("bad pending limit `{n}`"))?,
            ),
        });
    }
    let mut cfg = BenchConfig::new(workload, impl_id);
    cfg.threads = cli.threads.clone();
    cfg.ops_per_thread = cli.ops;
    cfg.buffer_size = cli.buffer_size;
    cfg.pending_limits = pending_limits;
    cfg.outside_work = cli.outside_work.clone();
    cfg.seed = cli.seed;
    cfg.runs = cli.runs;
    cfg.warmup_ops = cli.warmup;
    cfg.mode = mode;
    cfg.keep_first_history = cli.dump_history.is_some();
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("am-bench: {msg}");
            return ExitCode::from(2);
        }
    };

    if let Ok(parallelism) = std::thread::available_parallelism() {
        let wanted = cfg.threads.iter().copied().max().unwrap_or(1);
        if wanted > parallelism.get() {
            eprintln!(
                "am-bench: note: sweeping up to {wanted} worker threads on {} available \
                 hardware threads; absolute runtimes reflect oversubscription",
                parallelism.get()
            );
        }
    }

    let points = match run_bench(&cfg) {
        Ok(points) => points,
        Err(BenchError::Config(msg)) => {
            eprintln!("am-bench: {msg}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("am-bench: {e}");
            return ExitCode::FAILURE;
        }
    };

    let rows: Vec<CsvRow> = points
        .iter()
        .map(|p| {
            CsvRow::new(
                cfg.workload.id(),
                cfg.impl_id.id(),
                p.threads,
                p.param_name,
                &p.param_value,
                &p.summary,
            )
        })
        .collect();

    println!(
        "{:<4} {:<5} {:>7} {:<14} {:>10} {:>14} {:>12} {:>12}",
        "load", "impl", "threads", "param", "value", "trimmed_ns", "min_ns", "max_ns"
    );
    for r in &rows {
        println!(
            "{:<4} {:<5} {:>7} {:<14} {:>10} {:>14.0} {:>12} {:>12}",
            r.workload,
            r.impl_id,
            r.threads,
            r.param_name,
            r.param_value,
            r.trimmed_mean_ns,
            r.min_ns,
            r.max_ns
        );
    }

    if let Some(path) = &cli.csv {
        let file = match File::create(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("am-bench: cannot write {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        };
        let mut w = BufWriter::new(file);
        if let Err(e) = csv::emit_csv(&mut w, &rows).and_then(|_| w.flush()) {
            eprintln!("am-bench: csv write failed: {e}");
            return ExitCode::FAILURE;
        }
    }

    if let Some(path) = &cli.dump_history {
        let Some(history) = points.iter().find_map(|p| p.first_history.as_ref()) else {
            eprintln!("am-bench: no history recorded (is the impl `am`?)");
            return ExitCode::FAILURE;
        };
        let file = match File::create(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("am-bench: cannot write {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        };
        let mut w = BufWriter::new(file);
        if let Err(e) = history.write_dump(&mut w).and_then(|_| w.flush()) {
            eprintln!("am-bench: history dump failed: {e}");
            return ExitCode::FAILURE;
        }
    }

    ExitCode::SUCCESS
}
