//! Dynamically typed values passed into and out of monitor methods.
//!
//! Monitor state itself is an arbitrary Rust type owned by the executor
//! thread; only arguments, return values and per-call scratch variables cross
//! thread boundaries, so they use this small closed value type.

use std::collections::HashMap;
use std::fmt;

/// Argument / return value of a monitor method call.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Unit,
    Bool(bool),
    Int(i64),
    List(Vec<i64>),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[i64]> {
        match self {
            Value::List(v) => Some(v),
            _ => None,
        }
    }

    /// Panicking accessor for stage bodies that know their argument shape.
    /// A panic inside a stage is turned into a task failure by the executor.
    pub fn expect_int(&self) -> i64 {
        self.as_int().expect("expected Value::Int")
    }

    pub fn expect_list(&self) -> &[i64] {
        self.as_list().expect("expected Value::List")
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Value::Unit)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "()"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::List(v) => write!(f, "{v:?}"),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<Vec<i64>> for Value {
    fn from(v: Vec<i64>) -> Self {
        Value::List(v)
    }
}

impl From<()> for Value {
    fn from(_: ()) -> Self {
        Value::Unit
    }
}

/// Intermediate variables shared between the stages of one method call.
///
/// A multi-stage call (one `waituntil` style guard in the middle of the
/// method) needs to carry values computed by an earlier stage into a later
/// stage; the runtime threads one `Scratch` through the whole chain.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    slots: HashMap<&'static str, Value>,
}

impl Scratch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &'static str, value: impl Into<Value>) {
        self.slots.insert(key, value.into());
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.slots.get(key)
    }

    pub fn int(&self, key: &str) -> Option<i64> {
        self.get(key).and_then(Value::as_int)
    }

    /// Panicking accessor used by stage bodies whose earlier stage is known
    /// to have stored the slot.
    pub fn expect_int(&self, key: &str) -> i64 {
        self.int(key)
            .unwrap_or_else(|| panic!("scratch slot `{key}` missing or not an int"))
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scratch_roundtrip() {
        let mut s = Scratch::new();
        assert!(s.is_empty());
        s.set("ticket", 42);
        assert_eq!(s.int("ticket"), Some(42));
        assert_eq!(s.expect_int("ticket"), 42);
        assert!(s.get("other").is_none());
    }

    #[test]
    fn value_accessors() {
        assert_eq!(Value::Int(3).as_int(), Some(3));
        assert_eq!(Value::Unit.as_int(), None);
        assert_eq!(Value::List(vec![1, 2]).as_list(), Some(&[1, 2][..]));
        assert!(Value::from(()).is_unit());
    }
}
