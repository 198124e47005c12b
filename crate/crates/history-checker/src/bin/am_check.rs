//! Reads a history dump and reports the ordering-rule verdicts.
//!
//! Usage: `am-check [--strict] <dump-file>`
//!
//! Prints a text report to stderr and one JSON line per check to stdout.
//! Exits nonzero if any check fails or the history is malformed.

use std::fs::File;
use std::io::BufReader;
use std::process::ExitCode;

use history_checker::check_rules;
use monitor_core::history::History;

fn main() -> ExitCode {
    let mut strict = false;
    let mut path: Option<String> = None;
    for arg in std::env::args().skip(1) {
        match arg.as_str() {
            "--strict" => strict = true,
            "--help" | "-h" => {
                eprintln!("usage: am-check [--strict] <dump-file>");
                return ExitCode::SUCCESS;
            }
            other if path.is_none() && !other.starts_with('-') => path = Some(other.to_string()),
            other => {
                eprintln!("am-check: unexpected argument `{other}`");
                return ExitCode::from(2);
            }
        }
    }
    let Some(path) = path else {
        eprintln!("usage: am-check [--strict] <dump-file>");
        return ExitCode::from(2);
    };

    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("am-check: cannot open {path}: {e}");
            return ExitCode::from(2);
        }
    };
    let history = match History::parse_dump(BufReader::new(file)) {
        Ok(h) => h,
        Err(e) => {
            eprintln!("am-check: {e}");
            return ExitCode::from(2);
        }
    };
    match check_rules(&history, strict) {
        Ok(report) => {
            eprint!("{}", report.render_text());
            print!("{}", report.summary_lines());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(malformed) => {
            eprintln!("am-check: malformed history: {malformed}");
            println!(
                "{}",
                serde_json::json!({
                    "check": "well_formed",
                    "verdict": "fail",
                    "detail": malformed.to_string(),
                })
            );
            ExitCode::FAILURE
        }
    }
}
