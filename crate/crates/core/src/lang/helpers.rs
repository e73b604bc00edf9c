use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::ast::BinOp;
use super::eval::{binary, iterate};
use super::EvalError;
use crate::value::{value_cmp, Value};

pub type HelperFn = Arc<dyn Fn(&[&Value]) -> Result<Value, EvalError> + Send + Sync>;
pub type AccessorFn = Arc<dyn Fn(&Value) -> Result<Value, EvalError> + Send + Sync>;

/// Longest sequence `range` will materialize.
pub const MAX_RANGE_LEN: usize = 1 << 20;

/// Helper functions and attribute accessors visible to conditions.
#[derive(Clone)]
pub struct Namespace {
    helpers: BTreeMap<String, HelperFn>,
    accessors: BTreeMap<String, AccessorFn>,
}

impl Default for Namespace {
    fn default() -> Self {
        Namespace::builtins()
    }
}

impl core::fmt::Debug for Namespace {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Namespace")
            .field("helpers", &self.helpers.keys().collect::<Vec<_>>())
            .field("accessors", &self.accessors.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Namespace {
    /// No helpers at all.
    pub fn empty() -> Self {
        Namespace {
            helpers: BTreeMap::new(),
            accessors: BTreeMap::new(),
        }
    }

    /// `len`, `abs`, `min`, `max`, `sum`, `range`, `all`, `any`.
    pub fn builtins() -> Self {
        let mut ns = Namespace::empty();
        ns.register("len", len);
        ns.register("abs", abs);
        ns.register("min", |a: &[&Value]| extremum(a, Ordering::Less, "min"));
        ns.register("max", |a: &[&Value]| extremum(a, Ordering::Greater, "max"));
        ns.register("sum", sum);
        ns.register("range", range);
        ns.register("all", |a: &[&Value]| truth_fold(a, true, "all"));
        ns.register("any", |a: &[&Value]| truth_fold(a, false, "any"));
        ns
    }

    pub fn register(
        &mut self,
        name: impl Into<String>,
        f: impl Fn(&[&Value]) -> Result<Value, EvalError> + Send + Sync + 'static,
    ) -> &mut Self {
        self.helpers.insert(name.into(), Arc::new(f));
        self
    }

    /// Makes `base.name` legal in conditions.
    pub fn register_accessor(
        &mut self,
        name: impl Into<String>,
        f: impl Fn(&Value) -> Result<Value, EvalError> + Send + Sync + 'static,
    ) -> &mut Self {
        self.accessors.insert(name.into(), Arc::new(f));
        self
    }

    pub fn helper(&self, name: &str) -> Option<&HelperFn> {
        self.helpers.get(name)
    }

    pub fn accessor(&self, name: &str) -> Option<&AccessorFn> {
        self.accessors.get(name)
    }

    pub fn has_helper(&self, name: &str) -> bool {
        self.helpers.contains_key(name)
    }

    /// Whether `.name` may appear in a condition.
    pub fn has_attribute(&self, name: &str) -> bool {
        name == "shape" || self.accessors.contains_key(name)
    }
}

fn arity(name: &str, args: &[&Value], lo: usize, hi: usize) -> Result<(), EvalError> {
    if args.len() < lo || args.len() > hi {
        let want = if lo == hi {
            format!("{lo}")
        } else {
            format!("{lo} to {hi}")
        };
        return Err(EvalError::Type(format!(
            "{name}() takes {want} argument(s), got {}",
            args.len()
        )));
    }
    Ok(())
}

fn len(args: &[&Value]) -> Result<Value, EvalError> {
    arity("len", args, 1, 1)?;
    let n = match args[0] {
        Value::Seq(v) | Value::Tuple(v) => v.len(),
        Value::Text(s) => s.chars().count(),
        Value::Map(m) => m.len(),
        Value::NdArray(a) if a.rank() > 0 => a.outer_len(),
        other => return Err(EvalError::Type(format!("{} has no len()", other.tag()))),
    };
    Ok(Value::Int(BigInt::from(n)))
}

fn abs(args: &[&Value]) -> Result<Value, EvalError> {
    arity("abs", args, 1, 1)?;
    match args[0] {
        Value::Int(i) => Ok(Value::Int(i.abs())),
        Value::Float(x) => Ok(Value::Float(libm::fabs(*x))),
        other => Err(EvalError::Type(format!("bad operand type for abs(): {}", other.tag()))),
    }
}

/// Keeps the first element that is strictly better than all earlier ones.
fn extremum(args: &[&Value], better: Ordering, name: &str) -> Result<Value, EvalError> {
    let owned;
    let items: Vec<&Value> = match args {
        [] => return Err(EvalError::Type(format!("{name}() expects at least one argument"))),
        [single] => {
            owned = iterate(single)?;
            owned.iter().collect()
        }
        many => many.to_vec(),
    };
    let mut best = *items
        .first()
        .ok_or_else(|| EvalError::Type(format!("{name}() of an empty sequence")))?;
    for &v in &items[1..] {
        let ord = value_cmp(v, best)
            .map_err(|(a, b)| EvalError::Type(format!("{name}() cannot compare {a} and {b}")))?;
        if ord == Some(better) {
            best = v;
        }
    }
    Ok(best.clone())
}

fn sum(args: &[&Value]) -> Result<Value, EvalError> {
    arity("sum", args, 1, 2)?;
    let items = iterate(args[0])?;
    let mut total = args.get(1).map_or(Value::Int(BigInt::zero()), |v| (*v).clone());
    for v in items.iter() {
        total = binary(BinOp::Add, &total, v)?;
    }
    Ok(total)
}

fn range_arg(v: &Value) -> Result<i64, EvalError> {
    v.as_int()
        .and_then(|i| i.to_i64())
        .ok_or_else(|| EvalError::Type(format!("range() needs machine-size integers, got {v}")))
}

fn range(args: &[&Value]) -> Result<Value, EvalError> {
    arity("range", args, 1, 3)?;
    let nums = args.iter().map(|v| range_arg(v)).collect::<Result<Vec<_>, _>>()?;
    let (start, stop, step) = match nums[..] {
        [stop] => (0, stop, 1),
        [start, stop] => (start, stop, 1),
        [start, stop, step] => (start, stop, step),
        _ => unreachable!(),
    };
    if step == 0 {
        return Err(EvalError::Type("range() step must not be zero".into()));
    }
    let span = if step > 0 {
        (i128::from(stop) - i128::from(start)).max(0)
    } else {
        (i128::from(start) - i128::from(stop)).max(0)
    };
    let count = (span + i128::from(step.unsigned_abs()) - 1) / i128::from(step.unsigned_abs());
    if count > MAX_RANGE_LEN as i128 {
        return Err(EvalError::Type(format!("range() of {count} elements is too long")));
    }
    let out = (0..count as i64)
        .map(|k| Value::Int(BigInt::from(start) + BigInt::from(k) * BigInt::from(step)))
        .collect();
    Ok(Value::Seq(out))
}

fn truth_fold(args: &[&Value], all: bool, name: &str) -> Result<Value, EvalError> {
    arity(name, args, 1, 1)?;
    for v in iterate(args[0])?.iter() {
        let b = v
            .as_bool()
            .ok_or_else(|| EvalError::Type(format!("{name}() needs booleans, got {} {v}", v.tag())))?;
        if b != all {
            return Ok(Value::Bool(!all));
        }
    }
    Ok(Value::Bool(all))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Value {
        Value::Seq(xs.iter().map(|&x| Value::int(x)).collect())
    }

    #[test]
    fn range_matches_reference() {
        for start in -4..=4 {
            for stop in -4..=4 {
                for step in [-3, -2, -1, 1, 2, 3] {
                    let mut expect = Vec::new();
                    let mut i = start;
                    while (step > 0 && i < stop) || (step < 0 && i > stop) {
                        expect.push(i);
                        i += step;
                    }
                    let got = range(&[&Value::int(start), &Value::int(stop), &Value::int(step)]).unwrap();
                    assert_eq!(got, ints(&expect), "range({start}, {stop}, {step})");
                }
            }
        }
    }

    #[test]
    fn aggregates() {
        let xs = ints(&[3, -1, 2]);
        assert_eq!(sum(&[&xs]).unwrap(), Value::int(4));
        assert_eq!(extremum(&[&xs], Ordering::Less, "min").unwrap(), Value::int(-1));
        assert_eq!(extremum(&[&Value::int(2), &Value::Float(2.5)], Ordering::Greater, "max").unwrap(), Value::Float(2.5));
        assert!(extremum(&[&ints(&[])], Ordering::Less, "min").is_err());
        assert_eq!(len(&[&Value::text("héllo")]).unwrap(), Value::int(5));
        assert_eq!(abs(&[&Value::int(-3)]).unwrap(), Value::int(3));
    }

    #[test]
    fn sum_of_floats_is_float() {
        let xs = Value::floats(&[0.5, 0.25]);
        assert_eq!(sum(&[&xs]).unwrap(), Value::Float(0.75));
    }
}
