use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::RngCore;

use super::{predicate_error, PredicateError, Refinement};
use crate::value::Value;

type CheckHook = Arc<dyn Fn(&Value) -> Result<bool, String> + Send + Sync>;
type GenerateHook = Arc<dyn Fn(&mut dyn RngCore) -> Option<Value> + Send + Sync>;

/// A host-defined nominal type used as a refinement type.
///
/// Without hooks a value is a member when it is a [`Handle`](crate::Handle)
/// whose type chain contains the tag, so subtypes are accepted. A
/// `custom_check` hook replaces that test entirely.
#[derive(Clone)]
pub struct NominalAdapter {
    tag: String,
    custom_check: Option<CheckHook>,
    custom_generate: Option<GenerateHook>,
}

impl NominalAdapter {
    pub fn new(tag: impl Into<String>) -> Self {
        NominalAdapter {
            tag: tag.into(),
            custom_check: None,
            custom_generate: None,
        }
    }

    pub fn with_check(mut self, hook: impl Fn(&Value) -> Result<bool, String> + Send + Sync + 'static) -> Self {
        self.custom_check = Some(Arc::new(hook));
        self
    }

    pub fn with_generator(mut self, hook: impl Fn(&mut dyn RngCore) -> Option<Value> + Send + Sync + 'static) -> Self {
        self.custom_generate = Some(Arc::new(hook));
        self
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }
}

/// `custom_check` if present, otherwise instance-of with subtype acceptance.
pub fn nominal_check(a: &NominalAdapter, v: &Value) -> Result<bool, PredicateError> {
    a.check(v)
}

impl Refinement for NominalAdapter {
    fn name(&self) -> String {
        self.tag.clone()
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        match &self.custom_check {
            Some(hook) => hook(v).map_err(|m| predicate_error(self, m)),
            None => Ok(matches!(v, Value::Handle(h) if h.is_instance_of(&self.tag))),
        }
    }

    fn sample(&self, rng: &mut dyn RngCore, _depth: u32) -> Option<Value> {
        self.custom_generate.as_ref().and_then(|g| g(rng))
    }
}

/// A refinement type defined by closures.
#[derive(Clone)]
pub struct Custom {
    name: String,
    check: CheckHook,
    generate: Option<GenerateHook>,
    boundary: Vec<Value>,
}

impl Custom {
    /// A type whose predicate cannot fail.
    pub fn new(name: impl Into<String>, check: impl Fn(&Value) -> bool + Send + Sync + 'static) -> Self {
        Custom::fallible(name, move |v| Ok(check(v)))
    }

    /// A type whose predicate may report an internal failure.
    pub fn fallible(
        name: impl Into<String>,
        check: impl Fn(&Value) -> Result<bool, String> + Send + Sync + 'static,
    ) -> Self {
        Custom {
            name: name.into(),
            check: Arc::new(check),
            generate: None,
            boundary: Vec::new(),
        }
    }

    pub fn with_generator(mut self, hook: impl Fn(&mut dyn RngCore) -> Option<Value> + Send + Sync + 'static) -> Self {
        self.generate = Some(Arc::new(hook));
        self
    }

    pub fn with_boundary(mut self, values: impl IntoIterator<Item = Value>) -> Self {
        self.boundary = values.into_iter().collect();
        self
    }
}

impl Refinement for Custom {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        (self.check)(v).map_err(|m| predicate_error(self, m))
    }

    fn boundary(&self) -> Vec<Value> {
        self.boundary.clone()
    }

    fn sample(&self, rng: &mut dyn RngCore, _depth: u32) -> Option<Value> {
        self.generate.as_ref().and_then(|g| g(rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Type;
    use crate::value::Handle;

    #[test]
    fn liskov_default() {
        let animal = NominalAdapter::new("Animal");
        let dog = Value::Handle(Handle::new(["Dog", "Animal"], ()));
        assert_eq!(nominal_check(&animal, &dog), Ok(true));
        assert_eq!(nominal_check(&NominalAdapter::new("Graph"), &Value::int(3)), Ok(false));
        assert_eq!(nominal_check(&NominalAdapter::new("Dog"), &Value::Handle(Handle::new(["Animal"], ()))), Ok(false));
    }

    #[test]
    fn hook_dominates() {
        let pair = NominalAdapter::new("Pair").with_check(|v| {
            let h = v.as_handle().ok_or("not a handle")?;
            let (a, b) = h.downcast_ref::<(i32, i32)>().ok_or("not a pair")?;
            Ok(*a > 0 && *b > 0)
        });
        let bad = Value::Handle(Handle::new(["Pair"], (1i32, -2i32)));
        let good = Value::Handle(Handle::new(["Unrelated"], (1i32, 2i32)));
        assert_eq!(nominal_check(&pair, &bad), Ok(false));
        assert_eq!(nominal_check(&pair, &good), Ok(true));
        let err = nominal_check(&pair, &Value::int(3)).unwrap_err();
        assert_eq!(err.ty, "Pair");
    }

    #[test]
    fn custom_generator_is_filtered() {
        let even = Custom::new("Even", |v| v.as_i64().is_some_and(|i| i % 2 == 0))
            .with_generator(|rng| Some(Value::int(i64::from(rng.next_u32() % 100))));
        let t = Type::new(even);
        assert!(t.generate(5, 50).all(|v| v.as_i64().unwrap() % 2 == 0));
    }
}
