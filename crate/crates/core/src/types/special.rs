use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::{PredicateError, Refinement};
use crate::value::Value;

#[derive(Debug, Clone, Copy)]
pub struct Boolean;

impl Refinement for Boolean {
    fn name(&self) -> String {
        "Boolean".into()
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        Ok(matches!(v, Value::Bool(_)))
    }

    fn boundary(&self) -> Vec<Value> {
        vec![Value::Bool(false), Value::Bool(true)]
    }

    fn sample(&self, rng: &mut dyn RngCore, _depth: u32) -> Option<Value> {
        Some(Value::Bool(rng.random()))
    }

    fn exhaustive(&self) -> bool {
        true
    }
}

/// Callable host handles, such as references to registered functions.
/// Never generated.
#[derive(Debug, Clone, Copy)]
pub struct Function;

impl Refinement for Function {
    fn name(&self) -> String {
        "Function".into()
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        Ok(matches!(v, Value::Handle(h) if h.is_callable()))
    }
}

/// Exactly one value.
#[derive(Debug, Clone)]
pub struct Constant {
    value: Value,
    label: Option<&'static str>,
}

impl Constant {
    pub fn new(value: Value) -> Self {
        Constant { value, label: None }
    }

    /// `Constant(None)` under the name `Nothing`.
    pub fn nothing() -> Self {
        Constant {
            value: Value::None,
            label: Some("Nothing"),
        }
    }
}

impl Refinement for Constant {
    fn name(&self) -> String {
        match self.label {
            Some(l) => l.into(),
            None => format!("Constant({})", self.value),
        }
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        Ok(v.tag() == self.value.tag() && v == &self.value)
    }

    fn boundary(&self) -> Vec<Value> {
        vec![self.value.clone()]
    }

    fn sample(&self, _rng: &mut dyn RngCore, _depth: u32) -> Option<Value> {
        Some(self.value.clone())
    }

    fn exhaustive(&self) -> bool {
        true
    }
}

/// Accepts everything; cannot generate.
#[derive(Debug, Clone, Copy)]
pub struct Unchecked;

impl Refinement for Unchecked {
    fn name(&self) -> String {
        "Unchecked".into()
    }

    fn check(&self, _v: &Value) -> Result<bool, PredicateError> {
        Ok(true)
    }
}

/// Accepts nothing.
#[derive(Debug, Clone, Copy)]
pub struct Void;

impl Refinement for Void {
    fn name(&self) -> String {
        "Void".into()
    }

    fn check(&self, _v: &Value) -> Result<bool, PredicateError> {
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use crate::types::*;
    use crate::value::{Handle, Value};

    #[test]
    fn special_types() {
        assert!(boolean().accepts(&Value::Bool(false)));
        assert!(!boolean().accepts(&Value::int(0)));
        assert!(function().accepts(&Value::Handle(Handle::function("f"))));
        assert!(!function().accepts(&Value::Handle(Handle::new(["Graph"], ()))));
        assert!(nothing().accepts(&Value::None));
        assert!(!nothing().accepts(&Value::Bool(false)));
        assert!(unchecked().accepts(&Value::Float(f64::NAN)));
        assert!(!void().accepts(&Value::None));
    }

    #[test]
    fn constant_is_tag_strict() {
        let one = constant(Value::int(1));
        assert!(one.accepts(&Value::int(1)));
        assert!(!one.accepts(&Value::Float(1.0)));
    }
}
