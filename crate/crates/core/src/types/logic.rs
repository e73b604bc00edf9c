use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::{draw, join_names, probe_values, sample_any, Offender, PredicateError, Refinement, Type, TypeError};
use crate::value::Value;

/// Members of every component type.
#[derive(Clone)]
pub struct AllOf {
    parts: Vec<Type>,
}

impl AllOf {
    pub fn new(parts: Vec<Type>) -> Result<Self, TypeError> {
        if parts.len() < 2 {
            return Err(TypeError::TooFewParts("And"));
        }
        Ok(AllOf { parts })
    }
}

impl Refinement for AllOf {
    fn name(&self) -> String {
        format!("And({})", join_names(&self.parts))
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        for t in &self.parts {
            if !t.check(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn boundary(&self) -> Vec<Value> {
        self.parts.iter().flat_map(Type::boundary).collect()
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        let mut any_source = false;
        for attempt in 0..32 {
            let source = &self.parts[attempt % self.parts.len()];
            if let Some(v) = draw(source, rng, depth) {
                any_source = true;
                if self.check(&v).unwrap_or(false) {
                    return Some(v);
                }
            }
        }
        any_source.then(|| sample_any(rng, depth))
    }

    fn exhaustive(&self) -> bool {
        self.parts.iter().any(Type::exhaustive)
    }

    fn offender(&self, v: &Value) -> Result<Option<Offender>, PredicateError> {
        for t in &self.parts {
            if !t.check(v)? {
                return t.offender(v);
            }
        }
        Ok(None)
    }
}

/// Members of at least one component type.
#[derive(Clone)]
pub struct AnyOf {
    parts: Vec<Type>,
}

impl AnyOf {
    pub fn new(parts: Vec<Type>) -> Result<Self, TypeError> {
        if parts.len() < 2 {
            return Err(TypeError::TooFewParts("Or"));
        }
        Ok(AnyOf { parts })
    }
}

impl Refinement for AnyOf {
    fn name(&self) -> String {
        format!("Or({})", join_names(&self.parts))
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        for t in &self.parts {
            if t.check(v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn boundary(&self) -> Vec<Value> {
        self.parts.iter().flat_map(Type::boundary).collect()
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        let start = rng.random_range(0..self.parts.len());
        (0..self.parts.len())
            .map(|i| &self.parts[(start + i) % self.parts.len()])
            .find_map(|t| draw(t, rng, depth))
    }

    fn exhaustive(&self) -> bool {
        self.parts.iter().all(Type::exhaustive)
    }
}

/// Everything the inner type rejects.
#[derive(Clone)]
pub struct Not {
    inner: Type,
}

impl Not {
    pub fn new(inner: Type) -> Self {
        Not { inner }
    }
}

impl Refinement for Not {
    fn name(&self) -> String {
        format!("Not({})", self.inner.name())
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        Ok(!self.inner.check(v)?)
    }

    fn boundary(&self) -> Vec<Value> {
        probe_values()
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        Some(sample_any(rng, depth))
    }
}

/// Members of the inner type, or `None`.
#[derive(Clone)]
pub struct Maybe {
    inner: Type,
}

impl Maybe {
    pub fn new(inner: Type) -> Self {
        Maybe { inner }
    }
}

impl Refinement for Maybe {
    fn name(&self) -> String {
        format!("Maybe({})", self.inner.name())
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        if matches!(v, Value::None) {
            return Ok(true);
        }
        self.inner.check(v)
    }

    fn boundary(&self) -> Vec<Value> {
        let mut out = alloc::vec![Value::None];
        out.extend(self.inner.boundary());
        out
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        if rng.random_bool(0.2) {
            return Some(Value::None);
        }
        draw(&self.inner, rng, depth).or(Some(Value::None))
    }

    fn exhaustive(&self) -> bool {
        self.inner.exhaustive()
    }

    fn offender(&self, v: &Value) -> Result<Option<Offender>, PredicateError> {
        self.inner.offender(v)
    }
}

#[cfg(test)]
mod tests {
    use crate::types::*;
    use crate::value::Value;

    #[test]
    fn combinators() {
        let unit = and([number(), range(0.0, 1.0)]);
        assert!(unit.accepts(&Value::Float(0.5)));
        assert!(!unit.accepts(&Value::Float(1.5)));
        let num_or_text = or([number(), string()]);
        assert!(num_or_text.accepts(&Value::text("x")));
        assert!(!num_or_text.accepts(&Value::None));
        assert!(not(number()).accepts(&Value::Float(f64::NAN)));
        assert!(maybe(number()).accepts(&Value::None));
        assert!(!maybe(number()).accepts(&Value::text("x")));
    }

    #[test]
    fn too_few_parts() {
        assert!(AllOf::new(alloc::vec![number()]).is_err());
        assert!(AnyOf::new(alloc::vec![]).is_err());
    }

    #[test]
    fn and_with_unchecked_still_generates() {
        let t = and([unchecked(), natural1()]);
        assert!(t.generate(1, 20).all(|v| natural1().accepts(&v)));
        assert!(t.is_generatable());
    }

    #[test]
    fn boolean_or_nothing_is_exhaustive() {
        let t = or([boolean(), nothing()]);
        assert_eq!(t.generate(0, 100).count(), 3);
    }
}
