//! Monitor definitions: state factory plus methods split into guarded stages.
//!
//! A method is an ordered chain of stages. Each stage pairs a pure
//! precondition with a body; a method whose guard sits in the middle of the
//! critical section becomes a two-stage chain, the first stage carrying the
//! constant-true precondition. The runtime derives one task per stage.

use std::any::Any;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use crate::error::ValidationError;
use crate::value::{Scratch, Value};

/// Outcome of a stage body. `Err` routes into the runtime's exception policy.
pub type BodyResult = Result<Value, BodyError>;

/// Failure raised by a stage body (explicitly or via panic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BodyError(pub String);

impl fmt::Display for BodyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for BodyError {
    fn from(s: &str) -> Self {
        BodyError(s.to_string())
    }
}

impl From<String> for BodyError {
    fn from(s: String) -> Self {
        BodyError(s)
    }
}

type PredFn = Arc<dyn Fn(&dyn Any, &[Value], &Scratch) -> bool + Send + Sync>;
type BodyFn = Arc<dyn Fn(&mut dyn Any, &[Value], &mut Scratch) -> BodyResult + Send + Sync>;
type StateInitFn = Box<dyn Fn() -> Box<dyn Any> + Send + Sync>;
type FingerprintFn = Arc<dyn Fn(&dyn Any) -> u64 + Send + Sync>;

/// A stage precondition. The tautology is represented explicitly so the
/// scheduler treats guarded and unguarded stages uniformly and validation can
/// report which stages are unconditioned.
#[derive(Clone)]
pub enum Precondition {
    Tautology,
    Guard(PredFn),
}

impl Precondition {
    pub fn is_tautology(&self) -> bool {
        matches!(self, Precondition::Tautology)
    }
}

/// One (precondition, body) segment of a method.
#[derive(Clone)]
pub struct Stage {
    pub(crate) precondition: Precondition,
    pub(crate) body: BodyFn,
    /// True when the body was declared empty (a pure barrier stage).
    pub(crate) barrier: bool,
}

impl Stage {
    /// Stage with an explicit guard. `S` is the monitor's state type.
    pub fn guarded<S, P, B>(pred: P, body: B) -> Stage
    where
        S: 'static,
        P: Fn(&S, &[Value], &Scratch) -> bool + Send + Sync + 'static,
        B: Fn(&mut S, &[Value], &mut Scratch) -> BodyResult + Send + Sync + 'static,
    {
        Stage {
            precondition: Precondition::Guard(wrap_pred(pred)),
            body: wrap_body(body),
            barrier: false,
        }
    }

    /// Stage with the constant-true precondition.
    pub fn unguarded<S, B>(body: B) -> Stage
    where
        S: 'static,
        B: Fn(&mut S, &[Value], &mut Scratch) -> BodyResult + Send + Sync + 'static,
    {
        Stage {
            precondition: Precondition::Tautology,
            body: wrap_body(body),
            barrier: false,
        }
    }

    /// Guarded stage with an empty body: completing it only signals that the
    /// precondition held.
    pub fn barrier<S, P>(pred: P) -> Stage
    where
        S: 'static,
        P: Fn(&S, &[Value], &Scratch) -> bool + Send + Sync + 'static,
    {
        Stage {
            precondition: Precondition::Guard(wrap_pred(pred)),
            body: Arc::new(|_, _, _| Ok(Value::Unit)),
            barrier: true,
        }
    }

    pub fn precondition(&self) -> &Precondition {
        &self.precondition
    }

    pub fn is_barrier(&self) -> bool {
        self.barrier
    }

    /// Evaluates the precondition. A panicking predicate counts as false.
    pub(crate) fn eval_precondition(&self, state: &dyn Any, args: &[Value], scratch: &Scratch) -> bool {
        match &self.precondition {
            Precondition::Tautology => true,
            Precondition::Guard(p) => {
                catch_unwind(AssertUnwindSafe(|| p(state, args, scratch))).unwrap_or(false)
            }
        }
    }

    pub(crate) fn run_body(
        &self,
        state: &mut dyn Any,
        args: &[Value],
        scratch: &mut Scratch,
    ) -> BodyResult {
        match catch_unwind(AssertUnwindSafe(|| (self.body)(state, args, scratch))) {
            Ok(r) => r,
            // `&*payload`: downcast the payload itself, not the box around it.
            Err(payload) => Err(BodyError(panic_message(&*payload))),
        }
    }
}

fn panic_message(payload: &(dyn Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        format!("stage body panicked: {s}")
    } else if let Some(s) = payload.downcast_ref::<String>() {
        format!("stage body panicked: {s}")
    } else {
        "stage body panicked".to_string()
    }
}

fn wrap_pred<S, P>(pred: P) -> PredFn
where
    S: 'static,
    P: Fn(&S, &[Value], &Scratch) -> bool + Send + Sync + 'static,
{
    Arc::new(move |state, args, scratch| {
        let s = state
            .downcast_ref::<S>()
            .expect("monitor state type does not match stage's state type");
        pred(s, args, scratch)
    })
}

fn wrap_body<S, B>(body: B) -> BodyFn
where
    S: 'static,
    B: Fn(&mut S, &[Value], &mut Scratch) -> BodyResult + Send + Sync + 'static,
{
    Arc::new(move |state, args, scratch| {
        let s = state
            .downcast_mut::<S>()
            .expect("monitor state type does not match stage's state type");
        body(s, args, scratch)
    })
}

/// Whether a caller is suspended for the duration of the call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MethodKind {
    Blocking,
    NonBlocking,
}

/// A monitor method: an ordered chain of stages plus its submission kind.
#[derive(Clone)]
pub struct MethodSpec {
    pub(crate) name: String,
    pub(crate) kind: MethodKind,
    pub(crate) returns_value: bool,
    pub(crate) stages: Vec<Stage>,
    pub(crate) recursive_blocking: bool,
}

impl MethodSpec {
    pub fn blocking(name: impl Into<String>) -> Self {
        MethodSpec {
            name: name.into(),
            kind: MethodKind::Blocking,
            returns_value: false,
            stages: Vec::new(),
            recursive_blocking: false,
        }
    }

    pub fn non_blocking(name: impl Into<String>) -> Self {
        MethodSpec {
            name: name.into(),
            kind: MethodKind::NonBlocking,
            returns_value: false,
            stages: Vec::new(),
            recursive_blocking: false,
        }
    }

    pub fn returns_value(mut self) -> Self {
        self.returns_value = true;
        self
    }

    pub fn stage(mut self, stage: Stage) -> Self {
        self.stages.push(stage);
        self
    }

    /// Declaration marker: the method body re-enters its own monitor with a
    /// blocking call. Such methods cannot be turned into a task chain (the
    /// executor would deadlock on itself), so validation rejects them.
    pub fn flag_recursive_blocking(mut self) -> Self {
        self.recursive_blocking = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> MethodKind {
        self.kind
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn has_return_value(&self) -> bool {
        self.returns_value
    }
}

/// What `validate_method` learned about a method.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub method: String,
    pub kind: MethodKind,
    pub stage_count: usize,
    /// Indices of stages whose precondition is the constant-true tautology.
    pub tautology_stages: Vec<usize>,
}

/// Checks a method declaration against the staged-task model.
pub fn validate_method(method: &MethodSpec) -> Result<ValidationReport, ValidationError> {
    if method.stages.is_empty() {
        return Err(ValidationError::EmptyMethod {
            method: method.name.clone(),
        });
    }
    if method.recursive_blocking {
        return Err(ValidationError::RecursiveBlocking {
            method: method.name.clone(),
        });
    }
    let tautology_stages = method
        .stages
        .iter()
        .enumerate()
        .filter(|(_, s)| s.precondition.is_tautology())
        .map(|(i, _)| i)
        .collect();
    Ok(ValidationReport {
        method: method.name.clone(),
        kind: method.kind,
        stage_count: method.stages.len(),
        tautology_stages,
    })
}

/// A monitor definition: a named private state plus its methods.
///
/// The state value is constructed by the executor thread that the monitor is
/// assigned to and never leaves it; stage preconditions and bodies are the
/// only code that can touch it.
pub struct MonitorSpec {
    pub(crate) name: String,
    pub(crate) state_init: StateInitFn,
    pub(crate) fingerprint: Option<FingerprintFn>,
    pub(crate) methods: Vec<Arc<MethodSpec>>,
}

impl MonitorSpec {
    pub fn new<S, F>(name: impl Into<String>, init: F) -> Self
    where
        S: 'static,
        F: Fn() -> S + Send + Sync + 'static,
    {
        MonitorSpec {
            name: name.into(),
            state_init: Box::new(move || Box::new(init())),
            fingerprint: None,
            methods: Vec::new(),
        }
    }

    /// Registers a state fingerprint. When present, the executor fingerprints
    /// the state around every precondition evaluation and panics if a
    /// predicate mutated it (preconditions must be pure). Intended for tests;
    /// fingerprinting every evaluation is too expensive for benchmarks.
    pub fn with_fingerprint<S, F>(mut self, f: F) -> Self
    where
        S: 'static,
        F: Fn(&S) -> u64 + Send + Sync + 'static,
    {
        self.fingerprint = Some(Arc::new(move |state| {
            let s = state
                .downcast_ref::<S>()
                .expect("monitor state type does not match fingerprint's state type");
            f(s)
        }));
        self
    }

    pub fn method(mut self, method: MethodSpec) -> Self {
        self.methods.push(Arc::new(method));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn methods(&self) -> impl Iterator<Item = &Arc<MethodSpec>> {
        self.methods.iter()
    }

    pub fn method_named(&self, name: &str) -> Option<&Arc<MethodSpec>> {
        self.methods.iter().find(|m| m.name == name)
    }

    /// Validates every method; used by `MonitorRuntime::start`.
    pub fn validate(&self) -> Result<Vec<ValidationReport>, ValidationError> {
        self.methods.iter().map(|m| validate_method(m)).collect()
    }
}

impl fmt::Debug for MonitorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonitorSpec")
            .field("name", &self.name)
            .field("methods", &self.methods.iter().map(|m| m.name.clone()).collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Buf {
        item_count: usize,
        size: usize,
    }

    fn put_method() -> MethodSpec {
        MethodSpec::non_blocking("put").stage(Stage::guarded(
            |s: &Buf, _, _| s.item_count < s.size,
            |s: &mut Buf, _, _| {
                s.item_count += 1;
                Ok(Value::Unit)
            },
        ))
    }

    #[test]
    fn single_stage_put_is_valid() {
        let report = validate_method(&put_method()).unwrap();
        assert_eq!(report.stage_count, 1);
        assert!(report.tautology_stages.is_empty());
    }

    #[test]
    fn two_stage_method_reports_tautology() {
        // First stage unguarded, second guarded: the shape of a method whose
        // wait sits in the middle of the critical section.
        let bar = MethodSpec::blocking("bar")
            .stage(Stage::unguarded(|_: &mut Buf, _, _| Ok(Value::Unit)))
            .stage(Stage::guarded(
                |s: &Buf, _, _| s.item_count > 0,
                |_: &mut Buf, _, _| Ok(Value::Unit),
            ));
        let report = validate_method(&bar).unwrap();
        assert_eq!(report.stage_count, 2);
        assert_eq!(report.tautology_stages, vec![0]);
    }

    #[test]
    fn zero_stage_method_rejected() {
        let err = validate_method(&MethodSpec::blocking("empty")).unwrap_err();
        assert_eq!(
            err,
            ValidationError::EmptyMethod {
                method: "empty".into()
            }
        );
    }

    #[test]
    fn recursive_blocking_rejected() {
        let m = put_method().flag_recursive_blocking();
        let err = validate_method(&m).unwrap_err();
        assert!(matches!(err, ValidationError::RecursiveBlocking { .. }));
    }

    #[test]
    fn panicking_precondition_counts_as_false() {
        let stage = Stage::guarded(
            |_: &Buf, _, _| panic!("boom"),
            |_: &mut Buf, _, _| Ok(Value::Unit),
        );
        let state: Box<dyn std::any::Any> = Box::new(Buf {
            item_count: 0,
            size: 1,
        });
        let prev = std::panic::take_hook();
        std::panic::set_hook(Box::new(|_| {}));
        let executable = stage.eval_precondition(&*state, &[], &Scratch::new());
        std::panic::set_hook(prev);
        assert!(!executable);
    }

    #[test]
    fn panicking_body_becomes_body_error() {
        let stage = Stage::unguarded(|_: &mut Buf, _, _| panic!("kaput"));
        let mut state: Box<dyn std::any::Any> = Box::new(Buf {
            item_count: 0,
            size: 1,
        });
        let prev = std::panic::take_hook();
        std::panic::set_hook(Box::new(|_| {}));
        let out = stage.run_body(&mut *state, &[], &mut Scratch::new());
        std::panic::set_hook(prev);
        let err = out.unwrap_err();
        assert!(err.0.contains("kaput"));
    }
}
