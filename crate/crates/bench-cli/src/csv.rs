//! CSV emission and parsing for sweep results.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::stats::Summary;

pub const CSV_HEADER: &str =
    "workload,impl,threads,param_name,param_value,runs,trimmed_mean_ns,min_ns,max_ns";

/// One sweep-point row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub workload: String,
    pub impl_id: String,
    pub threads: usize,
    pub param_name: String,
    pub param_value: String,
    pub runs: usize,
    pub trimmed_mean_ns: f64,
    pub min_ns: u64,
    pub max_ns: u64,
}

impl CsvRow {
    pub fn new(
        workload: &str,
        impl_id: &str,
        threads: usize,
        param_name: &str,
        param_value: &str,
        summary: &Summary,
    ) -> Self {
        CsvRow {
            workload: workload.to_string(),
            impl_id: impl_id.to_string(),
            threads,
            param_name: param_name.to_string(),
            param_value: param_value.to_string(),
            runs: summary.runs_ns.len(),
            trimmed_mean_ns: summary.trimmed_mean_ns,
            min_ns: summary.min_ns,
            max_ns: summary.max_ns,
        }
    }
}

/// Writes the header plus one row per sweep point, in sweep order.
pub fn emit_csv<W: Write>(w: &mut W, rows: &[CsvRow]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.workload,
            r.impl_id,
            r.threads,
            r.param_name,
            r.param_value,
            r.runs,
            r.trimmed_mean_ns,
            r.min_ns,
            r.max_ns
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("csv line {line}: {message}")]
pub struct CsvParseError {
    pub line: usize,
    pub message: String,
}

pub fn parse_csv<R: BufRead>(r: R) -> Result<Vec<CsvRow>, CsvParseError> {
    let mut rows = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line.map_err(|e| CsvParseError {
            line: lineno + 1,
            message: format!("io error: {e}"),
        })?;
        if lineno == 0 {
            if line.trim() != CSV_HEADER {
                return Err(CsvParseError {
                    line: 1,
                    message: "unexpected header".into(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(CsvParseError {
                line: lineno + 1,
                message: format!("expected 9 fields, got {}", fields.len()),
            });
        }
        let parse_err = |message: String| CsvParseError {
            line: lineno + 1,
            message,
        };
        rows.push(CsvRow {
            workload: fields[0].to_string(),
            impl_id: fields[1].to_string(),
            threads: fields[2]
                .parse()
                .map_err(|_| parse_err("bad threads".into()))?,
            param_name: fields[3].to_string(),
            param_value: fields[4].to_string(),
            runs: fields[5].parse().map_err(|_| parse_err("bad runs".into()))?,
            trimmed_mean_ns: fields[6]
                .parse()
                .map_err(|_| parse_err("bad trimmed_mean_ns".into()))?,
            min_ns: fields[7]
                .parse()
                .map_err(|_| parse_err("bad min_ns".into()))?,
            max_ns: fields[8]
                .parse()
                .map_err(|_| parse_err("bad max_ns".into()))?,
        });
    }
    Ok(rows)
}
