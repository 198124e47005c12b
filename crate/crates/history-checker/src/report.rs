//! Check reports: human-readable text plus one machine-readable JSON line
//! per check (name, verdict, certificate offsets).

use serde_json::json;

use crate::rules::RuleOutcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
    /// Event offsets witnessing a violation (empty on pass).
    pub certificate: Vec<usize>,
}

impl CheckResult {
    pub fn from_rule(name: &str, outcome: &RuleOutcome) -> Self {
        CheckResult {
            name: name.to_string(),
            verdict: if outcome.pass {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            detail: outcome.detail.clone(),
            certificate: outcome
                .violation
                .map(|(a, b)| vec![a, b])
                .unwrap_or_default(),
        }
    }

    pub fn skipped(name: &str, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            verdict: Verdict::Skipped,
            detail: detail.into(),
            certificate: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn push(&mut self, result: CheckResult) {
        self.checks.push(result);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{:<22} {}", c.name, c.verdict.as_str().to_uppercase()));
            if !c.detail.is_empty() {
                out.push_str(&format!("  ({})", c.detail));
            }
            if !c.certificate.is_empty() {
                out.push_str(&format!("  events {:?}", c.certificate));
            }
            out.push('\n');
        }
        out
    }

    /// One JSON object per line: `{"check": .., "verdict": .., "certificate": [..]}`.
    pub fn summary_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let line = json!({
                "check": c.name,
                "verdict": c.verdict.as_str(),
                "detail": c.detail,
                "certificate": c.certificate,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}
