use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

use super::ast::{BinOp, Expr, Quant, UnaryOp};
use super::helpers::Namespace;
use super::EvalError;
use crate::value::{value_cmp, value_eq, NdArray, Value};

/// Name lookup for one evaluation frame.
pub trait Bindings {
    fn lookup(&self, name: &str) -> Option<&Value>;
}

impl Bindings for [(String, Value)] {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl Bindings for Vec<(String, Value)> {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.as_slice().lookup(name)
    }
}

impl<const N: usize> Bindings for [(&str, Value); N] {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.iter().find(|(n, _)| *n == name).map(|(_, v)| v)
    }
}

impl Bindings for BTreeMap<String, Value> {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.get(name)
    }
}

/// Evaluation environment: `frames[0]` is the current execution and
/// `frames[d]` the execution bound to backtick depth `d`.
#[derive(Clone, Copy)]
pub struct EvalEnv<'a> {
    pub frames: &'a [&'a dyn Bindings],
    pub namespace: &'a Namespace,
}

impl<'a> EvalEnv<'a> {
    pub fn new(frames: &'a [&'a dyn Bindings], namespace: &'a Namespace) -> Self {
        EvalEnv { frames, namespace }
    }
}

/// Quantifier variables in scope, innermost first.
struct Scope<'s> {
    name: &'s str,
    value: &'s Value,
    parent: Option<&'s Scope<'s>>,
}

impl Scope<'_> {
    fn find(&self, name: &str) -> Option<&Value> {
        if self.name == name {
            Some(self.value)
        } else {
            self.parent.and_then(|p| p.find(name))
        }
    }
}

pub fn evaluate(e: &Expr, env: &EvalEnv<'_>) -> Result<Value, EvalError> {
    eval(e, env, None).map(Cow::into_owned)
}

/// Evaluates a condition, which must produce a Bool.
pub fn evaluate_condition(e: &Expr, env: &EvalEnv<'_>) -> Result<bool, EvalError> {
    match &*eval(e, env, None)? {
        Value::Bool(b) => Ok(*b),
        other => Err(EvalError::Malformed(format!(
            "condition `{e}` produced {} {other}, not a boolean",
            other.tag()
        ))),
    }
}

fn expect_bool(v: &Value, what: &str) -> Result<bool, EvalError> {
    v.as_bool()
        .ok_or_else(|| EvalError::Type(format!("{what} needs a boolean, got {} {v}", v.tag())))
}

fn eval<'a>(e: &'a Expr, env: &EvalEnv<'a>, scope: Option<&'a Scope<'a>>) -> Result<Cow<'a, Value>, EvalError> {
    Ok(match e {
        Expr::Lit(l) => Cow::Owned(l.to_value()),
        Expr::Name(n) => {
            if let Some(v) = scope.and_then(|s| s.find(n)) {
                return Ok(Cow::Borrowed(v));
            }
            lookup(env, n, 0)?
        }
        Expr::Primed { name, depth } => lookup(env, name, *depth as usize)?,
        Expr::Unary(op, x) => {
            let v = eval(x, env, scope)?;
            Cow::Owned(unary(*op, &v)?)
        }
        Expr::Binary(BinOp::And, l, r) => {
            let lv = expect_bool(&*eval(l, env, scope)?, "`and`")?;
            let out = lv && expect_bool(&*eval(r, env, scope)?, "`and`")?;
            Cow::Owned(Value::Bool(out))
        }
        Expr::Binary(BinOp::Or, l, r) => {
            let lv = expect_bool(&*eval(l, env, scope)?, "`or`")?;
            let out = lv || expect_bool(&*eval(r, env, scope)?, "`or`")?;
            Cow::Owned(Value::Bool(out))
        }
        Expr::Binary(op, l, r) => {
            let lv = eval(l, env, scope)?;
            let rv = eval(r, env, scope)?;
            Cow::Owned(binary(*op, &lv, &rv)?)
        }
        Expr::Implies(l, r) => {
            let lv = expect_bool(&*eval(l, env, scope)?, "`-->`")?;
            let out = !lv || expect_bool(&*eval(r, env, scope)?, "`-->`")?;
            Cow::Owned(Value::Bool(out))
        }
        Expr::Iff(l, r) => {
            let lv = expect_bool(&*eval(l, env, scope)?, "`<-->`")?;
            let rv = expect_bool(&*eval(r, env, scope)?, "`<-->`")?;
            Cow::Owned(Value::Bool(lv == rv))
        }
        Expr::Index(base, idx) => {
            let b = eval(base, env, scope)?;
            let i = eval(idx, env, scope)?;
            index_cow(b, &i)?
        }
        Expr::Slice {
            base,
            start,
            stop,
            step,
        } => {
            let b = eval(base, env, scope)?;
            let bound = |x: &'a Option<alloc::boxed::Box<Expr>>| -> Result<Option<BigInt>, EvalError> {
                match x {
                    None => Ok(None),
                    Some(x) => slice_bound(&*eval(x, env, scope)?),
                }
            };
            let (start, stop, step) = (bound(start)?, bound(stop)?, bound(step)?);
            Cow::Owned(slice(&b, start, stop, step)?)
        }
        Expr::Attr(base, name) => {
            let b = eval(base, env, scope)?;
            Cow::Owned(attribute(env.namespace, &b, name)?)
        }
        Expr::Call(name, args) => {
            let helper = env
                .namespace
                .helper(name)
                .ok_or_else(|| EvalError::Malformed(format!("unknown helper `{name}`")))?;
            let vals = args
                .iter()
                .map(|a| eval(a, env, scope))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Value> = vals.iter().map(|c| &**c).collect();
            Cow::Owned(helper(&refs)?)
        }
        Expr::Quantifier {
            kind,
            body,
            var,
            iter,
        } => {
            let it = eval(iter, env, scope)?;
            let items = iterate(&it)?;
            let want = matches!(kind, Quant::Any);
            let mut found = !want;
            for item in items.iter() {
                let inner = Scope {
                    name: var,
                    value: item,
                    parent: scope,
                };
                let v = eval(body, env, Some(&inner))?;
                if expect_bool(&v, kind.name())? == want {
                    found = want;
                    break;
                }
            }
            Cow::Owned(Value::Bool(found))
        }
    })
}

fn lookup<'a>(env: &EvalEnv<'a>, name: &str, depth: usize) -> Result<Cow<'a, Value>, EvalError> {
    env.frames
        .get(depth)
        .and_then(|f| f.lookup(name))
        .map(Cow::Borrowed)
        .ok_or_else(|| EvalError::NameUnbound {
            name: name.to_string(),
            depth: depth as u32,
        })
}

fn unary(op: UnaryOp, v: &Value) -> Result<Value, EvalError> {
    match (op, v) {
        (UnaryOp::Not, _) => Ok(Value::Bool(!expect_bool(v, "`not`")?)),
        (UnaryOp::Neg, Value::Int(i)) => Ok(Value::Int(-i)),
        (UnaryOp::Neg, Value::Float(x)) => Ok(Value::Float(-x)),
        (UnaryOp::Pos, Value::Int(_) | Value::Float(_)) => Ok(v.clone()),
        _ => Err(EvalError::Type(format!(
            "bad operand type for unary {}: {}",
            if op == UnaryOp::Neg { "-" } else { "+" },
            v.tag()
        ))),
    }
}

fn type_err(op: BinOp, a: &Value, b: &Value) -> EvalError {
    EvalError::Type(format!(
        "unsupported operand types for {}: {} and {}",
        op.symbol(),
        a.tag(),
        b.tag()
    ))
}

/// Exponent bit budget above which integer powers fall back to floats.
const MAX_POW_BITS: u64 = 1 << 16;

pub(crate) fn binary(op: BinOp, a: &Value, b: &Value) -> Result<Value, EvalError> {
    use BinOp::*;
    if op.is_comparison() {
        return compare(op, a, b).map(Value::Bool);
    }
    Ok(match (a, b) {
        (Value::Int(x), Value::Int(y)) => match op {
            Add => Value::Int(x + y),
            Sub => Value::Int(x - y),
            Mul => Value::Int(x * y),
            Div => Value::Float(int_f64(x) / int_f64(y)),
            Mod => {
                if y.is_zero() {
                    Value::Float(f64::NAN)
                } else {
                    let r = x % y;
                    if !r.is_zero() && (r.sign() == Sign::Minus) != (y.sign() == Sign::Minus) {
                        Value::Int(r + y)
                    } else {
                        Value::Int(r)
                    }
                }
            }
            Pow => int_pow(x, y),
            _ => return Err(type_err(op, a, b)),
        },
        (Value::Int(_) | Value::Float(_), Value::Int(_) | Value::Float(_)) => {
            let (x, y) = (a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN));
            Value::Float(match op {
                Add => x + y,
                Sub => x - y,
                Mul => x * y,
                Div => x / y,
                Mod => float_mod(x, y),
                Pow => libm::pow(x, y),
                _ => return Err(type_err(op, a, b)),
            })
        }
        (Value::Text(x), Value::Text(y)) if op == Add => {
            let mut s = x.clone();
            s.push_str(y);
            Value::Text(s)
        }
        (Value::Seq(x), Value::Seq(y)) if op == Add => Value::Seq(x.iter().chain(y).cloned().collect()),
        (Value::Tuple(x), Value::Tuple(y)) if op == Add => Value::Tuple(x.iter().chain(y).cloned().collect()),
        _ => return Err(type_err(op, a, b)),
    })
}

fn int_f64(i: &BigInt) -> f64 {
    i.to_f64().unwrap_or(if i.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

fn int_pow(x: &BigInt, y: &BigInt) -> Value {
    if let Some(e) = y.to_u32() {
        if x.bits().saturating_mul(u64::from(e)) <= MAX_POW_BITS || x.bits() <= 1 {
            return Value::Int(x.pow(e));
        }
    }
    Value::Float(libm::pow(int_f64(x), int_f64(y)))
}

/// Remainder with the sign of the divisor.
fn float_mod(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        return f64::NAN;
    }
    let r = libm::fmod(x, y);
    if r != 0.0 && (r < 0.0) != (y < 0.0) {
        r + y
    } else {
        r
    }
}

fn compare(op: BinOp, a: &Value, b: &Value) -> Result<bool, EvalError> {
    match op {
        BinOp::Eq => return Ok(value_eq(a, b)),
        BinOp::Ne => return Ok(!value_eq(a, b)),
        _ => {}
    }
    let ord = value_cmp(a, b).map_err(|(x, y)| {
        EvalError::Type(format!("`{}` not supported between {x} and {y}", op.symbol()))
    })?;
    let Some(ord) = ord else {
        return Ok(false);
    };
    Ok(match op {
        BinOp::Lt => ord == Ordering::Less,
        BinOp::Le => ord != Ordering::Greater,
        BinOp::Gt => ord == Ordering::Greater,
        BinOp::Ge => ord != Ordering::Less,
        _ => unreachable!(),
    })
}

fn int_index(i: &Value) -> Result<&BigInt, EvalError> {
    i.as_int()
        .ok_or_else(|| EvalError::Type(format!("indices must be integers, not {}", i.tag())))
}

fn normalize(i: &BigInt, len: usize) -> Result<usize, EvalError> {
    let n = BigInt::from(len);
    let j = if i.is_negative() { i + &n } else { i.clone() };
    match j.to_usize() {
        Some(k) if k < len => Ok(k),
        _ => Err(EvalError::IndexOutOfBounds {
            index: i.to_string(),
            len,
        }),
    }
}

fn index_cow<'a>(base: Cow<'a, Value>, idx: &Value) -> Result<Cow<'a, Value>, EvalError> {
    match base {
        Cow::Borrowed(b) => match b {
            Value::Seq(items) | Value::Tuple(items) => {
                let k = normalize(int_index(idx)?, items.len())?;
                Ok(Cow::Borrowed(&items[k]))
            }
            Value::Map(m) => m.get(idx).map(Cow::Borrowed).ok_or_else(|| EvalError::IndexOutOfBounds {
                index: idx.render(),
                len: m.len(),
            }),
            other => index(other, idx).map(Cow::Owned),
        },
        Cow::Owned(b) => index(&b, idx).map(Cow::Owned),
    }
}

pub(crate) fn index(base: &Value, idx: &Value) -> Result<Value, EvalError> {
    match base {
        Value::Seq(items) | Value::Tuple(items) => {
            let k = normalize(int_index(idx)?, items.len())?;
            Ok(items[k].clone())
        }
        Value::Text(s) => {
            let chars: Vec<char> = s.chars().collect();
            let k = normalize(int_index(idx)?, chars.len())?;
            Ok(Value::Text(chars[k].to_string()))
        }
        Value::NdArray(a) if a.rank() > 0 => {
            let k = normalize(int_index(idx)?, a.outer_len())?;
            Ok(a.outer(k).unwrap_or(Value::None))
        }
        Value::Map(m) => m.get(idx).cloned().ok_or_else(|| EvalError::IndexOutOfBounds {
            index: idx.render(),
            len: m.len(),
        }),
        other => Err(EvalError::Type(format!("{} is not indexable", other.tag()))),
    }
}

fn slice_bound(v: &Value) -> Result<Option<BigInt>, EvalError> {
    match v {
        Value::None => Ok(None),
        Value::Int(i) => Ok(Some(i.clone())),
        other => Err(EvalError::Type(format!(
            "slice bounds must be integers or None, not {}",
            other.tag()
        ))),
    }
}

fn clamp_i64(i: &BigInt) -> i64 {
    i.to_i64()
        .unwrap_or(if i.is_negative() { i64::MIN / 2 } else { i64::MAX / 2 })
}

/// Positions selected by `[start:stop:step]` on a sequence of length `len`.
pub fn slice_indices(len: usize, start: Option<i64>, stop: Option<i64>, step: i64) -> Vec<usize> {
    let n = len as i64;
    let mut out = Vec::new();
    if step > 0 {
        let fix = |x: i64| if x < 0 { (x + n).max(0) } else { x.min(n) };
        let mut i = start.map_or(0, fix);
        let stop = stop.map_or(n, fix);
        while i < stop {
            out.push(i as usize);
            i += step;
        }
    } else {
        let fix = |x: i64| if x < 0 { (x + n).max(-1) } else { x.min(n - 1) };
        let mut i = start.map_or(n - 1, fix);
        let stop = stop.map_or(-1, fix);
        while i > stop {
            out.push(i as usize);
            i += step;
        }
    }
    out
}

pub(crate) fn slice(
    base: &Value,
    start: Option<BigInt>,
    stop: Option<BigInt>,
    step: Option<BigInt>,
) -> Result<Value, EvalError> {
    let step = match step {
        None => 1,
        Some(s) if s.is_zero() => return Err(EvalError::Type("slice step cannot be zero".into())),
        Some(s) => clamp_i64(&s),
    };
    let (start, stop) = (start.as_ref().map(clamp_i64), stop.as_ref().map(clamp_i64));
    let pick = |len: usize| slice_indices(len, start, stop, step);
    Ok(match base {
        Value::Seq(items) => Value::Seq(pick(items.len()).into_iter().map(|i| items[i].clone()).collect()),
        Value::Tuple(items) => Value::Tuple(pick(items.len()).into_iter().map(|i| items[i].clone()).collect()),
        Value::Text(s) => {
            let chars: Vec<char> = s.chars().collect();
            Value::Text(pick(chars.len()).into_iter().map(|i| chars[i]).collect())
        }
        Value::NdArray(a) if a.rank() > 0 => Value::NdArray(a.select_outer(&pick(a.outer_len()))),
        other => return Err(EvalError::Type(format!("{} cannot be sliced", other.tag()))),
    })
}

fn attribute(ns: &Namespace, v: &Value, name: &str) -> Result<Value, EvalError> {
    if let (Value::NdArray(a), "shape") = (v, name) {
        return Ok(shape_tuple(a));
    }
    match ns.accessor(name) {
        Some(f) => f(v),
        None if name == "shape" => Err(EvalError::Type(format!("{} has no attribute `shape`", v.tag()))),
        None => Err(EvalError::Malformed(format!("attribute `{name}` is not registered"))),
    }
}

fn shape_tuple(a: &NdArray) -> Value {
    Value::Tuple(a.shape().iter().map(|&d| Value::Int(BigInt::from(d))).collect())
}

/// Elements visited by quantifiers and aggregate helpers: sequence items,
/// characters of a text, mapping keys, or first-axis slices of an array.
pub fn iterate(v: &Value) -> Result<Cow<'_, [Value]>, EvalError> {
    Ok(match v {
        Value::Seq(items) | Value::Tuple(items) => Cow::Borrowed(items.as_slice()),
        Value::Text(s) => Cow::Owned(s.chars().map(|c| Value::Text(c.to_string())).collect()),
        Value::Map(m) => Cow::Owned(m.keys().cloned().collect()),
        Value::NdArray(a) if a.rank() > 0 => Cow::Owned((0..a.outer_len()).filter_map(|i| a.outer(i)).collect()),
        other => return Err(EvalError::Type(format!("{} is not iterable", other.tag()))),
    })
}
