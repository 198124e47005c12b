//! Runtime configuration, loadable from a `key=value` file with `AM_*`
//! environment overrides.

use std::any::Any;
use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use crate::error::ConfigError;
use crate::spec::BodyError;
use crate::value::Value;

/// Whether the cross-monitor submission rule is enforced.
///
/// In `Strict` mode a worker whose most recent submission was a still
/// incomplete non-blocking task on a *different* monitor is suspended until
/// that task completes before its next submission is enqueued. This makes the
/// whole execution equivalent to a lock-based one. `Relaxed` drops the wait;
/// executions are still linearizable under the task-submission reading of
/// invocation and response.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderingMode {
    Strict,
    Relaxed,
}

/// What the executor does when a stage body fails.
#[derive(Clone)]
pub enum ExceptionPolicy {
    /// Log and fail the handle; successor stages are cancelled.
    Ignore,
    /// Re-enqueue the task at its lane head for up to this many total
    /// executions, then fail.
    Retry(u32),
    /// User callback decides per failure.
    Hook(Arc<dyn Fn(&TaskErrorContext<'_>) -> HookDecision + Send + Sync>),
}

impl std::fmt::Debug for ExceptionPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExceptionPolicy::Ignore => write!(f, "Ignore"),
            ExceptionPolicy::Retry(n) => write!(f, "Retry({n})"),
            ExceptionPolicy::Hook(_) => write!(f, "Hook(..)"),
        }
    }
}

/// Information handed to an exception hook.
pub struct TaskErrorContext<'a> {
    pub monitor: &'a str,
    pub method: &'a str,
    pub stage: usize,
    pub attempts: u32,
    pub error: &'a BodyError,
    /// The monitor state, for hooks that want to inspect it. Runs on the
    /// executor thread, so access is race-free.
    pub state: &'a dyn Any,
}

/// Hook verdict for a failed task execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HookDecision {
    Retry,
    Fail,
    /// Complete the stage as if its body had returned this value.
    Substitute(Value),
}

/// Runtime-wide settings.
#[derive(Clone, Debug)]
pub struct RuntimeConfig {
    /// Upper bound on executor threads; the runtime spawns
    /// `min(max_monitor_threads, monitor_count)`.
    pub max_monitor_threads: usize,
    pub ordering_mode: OrderingMode,
    /// Per-monitor cap on enqueued-but-incomplete non-blocking calls.
    /// `None` = unbounded. `Some(0)` degenerates every non-blocking
    /// submission into a blocking one.
    pub pending_limit: Option<usize>,
    pub exception_policy: ExceptionPolicy,
    pub history_recording: bool,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        RuntimeConfig {
            max_monitor_threads: 1,
            ordering_mode: OrderingMode::Strict,
            pending_limit: None,
            exception_policy: ExceptionPolicy::Ignore,
            history_recording: false,
        }
    }
}

impl RuntimeConfig {
    pub fn with_recording(mut self) -> Self {
        self.history_recording = true;
        self
    }

    pub fn relaxed(mut self) -> Self {
        self.ordering_mode = OrderingMode::Relaxed;
        self
    }

    /// Parses a plain `key=value` file. Lines starting with `#` and blank
    /// lines are skipped. Unknown keys are rejected.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ConfigError(format!("cannot read config file: {e}")))?;
        Self::from_str_contents(&text)
    }

    pub fn from_str_contents(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RuntimeConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key=value", lineno + 1)))?;
            cfg.apply(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Applies `AM_*` environment variable overrides on top of `self`.
    pub fn with_env_overrides(mut self) -> Result<Self, ConfigError> {
        let vars: HashMap<&str, &str> = [
            ("AM_MAX_MONITOR_THREADS", "max_monitor_threads"),
            ("AM_ORDERING_MODE", "ordering_mode"),
            ("AM_PENDING_LIMIT", "pending_limit"),
            ("AM_EXCEPTION_POLICY", "exception_policy"),
        ]
        .into_iter()
        .collect();
        for (env_key, cfg_key) in vars {
            if let Ok(v) = std::env::var(env_key) {
                self.apply(cfg_key, v.trim())?;
            }
        }
        Ok(self)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "max_monitor_threads" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| ConfigError(format!("max_monitor_threads: bad value `{value}`")))?;
                if n == 0 {
                    return Err(ConfigError("max_monitor_threads must be >= 1".into()));
                }
                self.max_monitor_threads = n;
            }
            "ordering_mode" => {
                self.ordering_mode = match value {
                    "strict" => OrderingMode::Strict,
                    "relaxed" => OrderingMode::Relaxed,
                    other => {
                        return Err(ConfigError(format!(
                            "ordering_mode must be strict|relaxed, got `{other}`"
                        )))
                    }
                };
            }
            "pending_limit" => {
                self.pending_limit = match value {
                    "unbounded" | "none" => None,
                    n => Some(n.parse().map_err(|_| {
                        ConfigError(format!("pending_limit: bad value `{n}`"))
                    })?),
                };
            }
            "exception_policy" => {
                self.exception_policy = if value == "ignore" {
                    ExceptionPolicy::Ignore
                } else if let Some(n) = value.strip_prefix("retry:") {
                    let k: u32 = n
                        .parse()
                        .map_err(|_| ConfigError(format!("exception_policy: bad retry count `{n}`")))?;
                    if k == 0 {
                        return Err(ConfigError("retry count must be >= 1".into()));
                    }
                    ExceptionPolicy::Retry(k)
                } else {
                    return Err(ConfigError(format!(
                        "exception_policy must be ignore|retry:N, got `{value}`"
                    )));
                };
            }
            "history_recording" => {
                self.history_recording = match value {
                    "true" | "on" | "1" => true,
                    "false" | "off" | "0" => false,
                    other => {
                        return Err(ConfigError(format!(
                            "history_recording must be true|false, got `{other}`"
                        )))
                    }
                };
            }
            other => return Err(ConfigError(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let cfg = RuntimeConfig::from_str_contents(
            "# comment\n\
             max_monitor_threads = 4\n\
             ordering_mode=relaxed\n\
             pending_limit=16\n\
             exception_policy=retry:3\n\
             history_recording=true\n",
        )
        .unwrap();
        assert_eq!(cfg.max_monitor_threads, 4);
        assert_eq!(cfg.ordering_mode, OrderingMode::Relaxed);
        assert_eq!(cfg.pending_limit, Some(16));
        assert!(matches!(cfg.exception_policy, ExceptionPolicy::Retry(3)));
        assert!(cfg.history_recording);
    }

    #[test]
    fn unbounded_pending_limit() {
        let cfg = RuntimeConfig::from_str_contents("pending_limit=unbounded\n").unwrap();
        assert_eq!(cfg.pending_limit, None);
    }

    #[test]
    fn rejects_unknown_key_and_bad_values() {
        assert!(RuntimeConfig::from_str_contents("wat=1").is_err());
        assert!(RuntimeConfig::from_str_contents("max_monitor_threads=0").is_err());
        assert!(RuntimeConfig::from_str_contents("ordering_mode=loose").is_err());
        assert!(RuntimeConfig::from_str_contents("exception_policy=retry:x").is_err());
    }

    #[test]
    fn env_overrides_apply() {
        // Serialize access to the process environment.
        std::env::set_var("AM_ORDERING_MODE", "relaxed");
        std::env::set_var("AM_PENDING_LIMIT", "0");
        let cfg = RuntimeConfig::default().with_env_overrides().unwrap();
        std::env::remove_var("AM_ORDERING_MODE");
        std::env::remove_var("AM_PENDING_LIMIT");
        assert_eq!(cfg.ordering_mode, OrderingMode::Relaxed);
        assert_eq!(cfg.pending_limit, Some(0));
    }
}
