//! Refinement types: membership predicates over [`Value`] paired with value
//! generators.
//!
//! A type is anything implementing [`Refinement`]; [`Type`] is the shared,
//! cloneable handle the rest of the engine passes around. The default
//! catalogue lives in the submodules and is indexed by
//! [`build_default_catalogue`].

mod catalogue;
mod collections;
mod logic;
mod nominal;
mod numeric;
mod special;
mod text;

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::value::{Map, NdArray, Value};

pub use catalogue::{build_default_catalogue, CatalogueEntry, Param};
pub use collections::{DictOf, ListOf, NdArrayType, ParametersDict, SetOf, TupleOf};
pub use logic::{AllOf, AnyOf, Maybe, Not};
pub use nominal::{nominal_check, Custom, NominalAdapter};
pub use numeric::{NumericKind, NumericType, Range};
pub use special::{Boolean, Constant, Function, Unchecked, Void};
pub use text::{CharSet, TextClass, TextType};

/// Containers generated at this nesting depth or deeper are empty.
pub const MAX_GEN_DEPTH: u32 = 3;
/// Upper bound on generated container lengths.
pub const MAX_GEN_LEN: usize = 6;

const DRAW_ATTEMPTS: usize = 16;
const STREAM_MISSES: usize = 256;

/// A user-supplied predicate or generator hook failed. This means the
/// contract itself is broken, not that a value violated it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("predicate of type `{ty}` failed: {message}")]
pub struct PredicateError {
    pub ty: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypeError {
    #[error("{0} needs at least two component types")]
    TooFewParts(&'static str),
    #[error("invalid range endpoints {lo} and {hi}")]
    BadRange { lo: f64, hi: f64 },
    #[error("constructor `{name}` expects {expected}")]
    BadParams { name: String, expected: &'static str },
    #[error("unknown catalogue type `{0}`")]
    Unknown(String),
}

/// The part of a value responsible for a failed membership test.
#[derive(Debug, Clone, PartialEq)]
pub struct Offender {
    /// Index path from the checked value, e.g. `[0]` or `['a'][2]`.
    pub path: String,
    pub value: Value,
}

impl fmt::Display for Offender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "element {} = {}", self.path, self.value)
    }
}

/// A refinement type.
///
/// `check` must be total over every tag. Generation is split into a fixed
/// list of edge members ([`boundary`](Refinement::boundary)) and random
/// members ([`sample`](Refinement::sample)); the engine filters both through
/// `check`, so an implementation may return non-members, they are only wasted.
pub trait Refinement: Send + Sync {
    fn name(&self) -> String;

    fn check(&self, v: &Value) -> Result<bool, PredicateError>;

    fn boundary(&self) -> Vec<Value> {
        Vec::new()
    }

    /// A random member, or `None` if this type cannot generate values.
    fn sample(&self, _rng: &mut dyn RngCore, _depth: u32) -> Option<Value> {
        None
    }

    /// `true` when `boundary` already lists every member, so a generated
    /// stream ends once the boundary is exhausted.
    fn exhaustive(&self) -> bool {
        false
    }

    /// Locates the offending element of a rejected container.
    fn offender(&self, _v: &Value) -> Result<Option<Offender>, PredicateError> {
        Ok(None)
    }
}

/// Shared handle to a refinement type.
#[derive(Clone)]
pub struct Type(Arc<dyn Refinement>);

impl Type {
    pub fn new(r: impl Refinement + 'static) -> Self {
        Type(Arc::new(r))
    }

    pub fn name(&self) -> String {
        self.0.name()
    }

    pub fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        self.0.check(v)
    }

    /// Membership with predicate failures counted as non-membership.
    pub fn accepts(&self, v: &Value) -> bool {
        self.0.check(v).unwrap_or(false)
    }

    pub fn boundary(&self) -> Vec<Value> {
        self.0.boundary()
    }

    pub fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        self.0.sample(rng, depth)
    }

    pub fn exhaustive(&self) -> bool {
        self.0.exhaustive()
    }

    pub fn offender(&self, v: &Value) -> Result<Option<Offender>, PredicateError> {
        self.0.offender(v)
    }

    /// Deterministic stream of at most `max_count` members: boundary
    /// members first, then seeded random members. Empty when the type cannot
    /// generate.
    pub fn generate(&self, seed: u64, max_count: usize) -> Generate {
        Generate {
            boundary: self.boundary(),
            ty: self.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            pos: 0,
            remaining: max_count,
            finished: false,
        }
    }

    /// Whether this type can produce at least one member.
    pub fn is_generatable(&self) -> bool {
        self.generate(0, 1).next().is_some()
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl<R: Refinement + 'static> From<R> for Type {
    fn from(r: R) -> Self {
        Type::new(r)
    }
}

/// Stream returned by [`Type::generate`].
pub struct Generate {
    ty: Type,
    rng: ChaCha8Rng,
    boundary: Vec<Value>,
    pos: usize,
    remaining: usize,
    finished: bool,
}

impl Iterator for Generate {
    type Item = Value;

    fn next(&mut self) -> Option<Value> {
        if self.remaining == 0 || self.finished {
            return None;
        }
        while self.pos < self.boundary.len() {
            let v = self.boundary[self.pos].clone();
            self.pos += 1;
            if self.ty.accepts(&v) {
                self.remaining -= 1;
                return Some(v);
            }
        }
        if !self.ty.exhaustive() {
            for _ in 0..STREAM_MISSES {
                match self.ty.sample(&mut self.rng, 0) {
                    Some(v) if self.ty.accepts(&v) => {
                        self.remaining -= 1;
                        return Some(v);
                    }
                    Some(_) => {}
                    None => break,
                }
            }
        }
        self.finished = true;
        None
    }
}

/// A member of `t` for embedding inside a generated container: mixes
/// boundary members and random samples, filtered through `check`.
pub(crate) fn draw(t: &Type, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
    let boundary = t.boundary();
    for _ in 0..DRAW_ATTEMPTS {
        let from_boundary = !boundary.is_empty() && (t.exhaustive() || rng.random_bool(0.3));
        let candidate = if from_boundary {
            Some(boundary[rng.random_range(0..boundary.len())].clone())
        } else {
            t.sample(rng, depth)
        };
        match candidate {
            Some(v) if t.accepts(&v) => return Some(v),
            Some(_) => {}
            None if boundary.is_empty() => return None,
            None => {
                let v = boundary[rng.random_range(0..boundary.len())].clone();
                if t.accepts(&v) {
                    return Some(v);
                }
            }
        }
    }
    None
}

pub(crate) fn gen_len(rng: &mut dyn RngCore, depth: u32) -> usize {
    if depth >= MAX_GEN_DEPTH {
        0
    } else {
        rng.random_range(0..=MAX_GEN_LEN)
    }
}

/// Formats a type parameter: integral doubles without a trailing `.0`.
pub(crate) fn fmt_num(x: f64) -> String {
    let mut s = String::new();
    let _ = crate::value::write_float(&mut s, x);
    match s.strip_suffix(".0") {
        Some(t) => t.to_string(),
        None => s,
    }
}

pub(crate) fn join_names(parts: &[Type]) -> String {
    parts.iter().map(Type::name).collect::<Vec<_>>().join(", ")
}

/// Random value of any tag; used where a type is defined by exclusion.
pub(crate) fn sample_any(rng: &mut dyn RngCore, depth: u32) -> Value {
    let pick = if depth >= MAX_GEN_DEPTH {
        rng.random_range(0..5)
    } else {
        rng.random_range(0..9)
    };
    match pick {
        0 => Value::None,
        1 => Value::Bool(rng.random()),
        2 => Value::Int(BigInt::from(rng.random_range(-1000i64..=1000))),
        3 => Value::Float(match rng.random_range(0..10) {
            0 => f64::NAN,
            1 => f64::INFINITY,
            2 => f64::NEG_INFINITY,
            _ => rng.random_range(-1e3..1e3),
        }),
        4 => {
            let n = rng.random_range(0..=MAX_GEN_LEN);
            Value::Text(
                (0..n)
                    .map(|_| char::from(rng.random_range(b'a'..=b'z')))
                    .collect(),
            )
        }
        5 => Value::Seq(
            (0..gen_len(rng, depth))
                .map(|_| sample_any(rng, depth + 1))
                .collect(),
        ),
        6 => Value::Tuple(
            (0..gen_len(rng, depth))
                .map(|_| sample_any(rng, depth + 1))
                .collect(),
        ),
        7 => {
            let mut m = Map::new();
            for _ in 0..gen_len(rng, depth) {
                let k = Value::Int(BigInt::from(rng.random_range(0..100)));
                let _ = m.insert(k, sample_any(rng, depth + 1));
            }
            Value::Map(m)
        }
        _ => {
            let n = rng.random_range(0..=MAX_GEN_LEN);
            Value::NdArray(NdArray::from_vec(
                (0..n).map(|_| rng.random_range(-10.0..10.0)).collect(),
            ))
        }
    }
}

/// Fixed probe set spanning every tag, used for `Not` boundaries.
pub(crate) fn probe_values() -> Vec<Value> {
    alloc::vec![
        Value::None,
        Value::Bool(false),
        Value::Bool(true),
        Value::int(0),
        Value::int(1),
        Value::int(-1),
        Value::Float(0.5),
        Value::Float(f64::NAN),
        Value::Float(f64::INFINITY),
        Value::text(""),
        Value::text("a"),
        Value::Seq(Vec::new()),
        Value::Tuple(Vec::new()),
        Value::Map(Map::new()),
        Value::NdArray(NdArray::from_vec(Vec::new())),
    ]
}

pub(crate) fn predicate_error(ty: &dyn Refinement, message: impl Into<String>) -> PredicateError {
    PredicateError {
        ty: ty.name(),
        message: message.into(),
    }
}

// Convenience constructors mirroring the catalogue names.

pub fn numeric() -> Type {
    NumericType::new(NumericKind::Numeric).into()
}
pub fn extended_real() -> Type {
    NumericType::new(NumericKind::ExtendedReal).into()
}
pub fn number() -> Type {
    NumericType::new(NumericKind::Number).into()
}
pub fn integer() -> Type {
    NumericType::new(NumericKind::Integer).into()
}
pub fn natural0() -> Type {
    NumericType::new(NumericKind::Natural0).into()
}
pub fn natural1() -> Type {
    NumericType::new(NumericKind::Natural1).into()
}
pub fn positive0() -> Type {
    NumericType::new(NumericKind::Positive0).into()
}
pub fn positive() -> Type {
    NumericType::new(NumericKind::Positive).into()
}

/// Closed range `[lo, hi]`. Panics if the endpoints are NaN or `lo > hi`.
pub fn range(lo: f64, hi: f64) -> Type {
    Range::closed(lo, hi).expect("valid range endpoints").into()
}
pub fn range_closed_open(lo: f64, hi: f64) -> Type {
    Range::closed_open(lo, hi).expect("valid range endpoints").into()
}
pub fn range_open_closed(lo: f64, hi: f64) -> Type {
    Range::open_closed(lo, hi).expect("valid range endpoints").into()
}
pub fn range_open(lo: f64, hi: f64) -> Type {
    Range::open(lo, hi).expect("valid range endpoints").into()
}

/// Any array.
pub fn ndarray() -> NdArrayType {
    NdArrayType::any()
}

pub fn string() -> Type {
    TextType::new(TextClass::Any).into()
}
pub fn identifier() -> Type {
    TextType::new(TextClass::Identifier).into()
}
pub fn alphanumeric() -> Type {
    TextType::new(TextClass::Alphanumeric).into()
}
pub fn latin() -> Type {
    TextType::new(TextClass::Latin).into()
}

pub fn tuple(parts: impl IntoIterator<Item = Type>) -> Type {
    TupleOf::new(parts.into_iter().collect()).into()
}
pub fn list(elem: Type) -> Type {
    ListOf::new(elem).into()
}
pub fn dict(key: Type, value: Type) -> Type {
    DictOf::new(key, value).into()
}
/// Unordered collection of distinct members of `elem`.
pub fn set_of(elem: Type) -> Type {
    SetOf::new(elem).into()
}
/// One-character text drawn from `alphabet`.
pub fn set_chars(alphabet: &str) -> Type {
    CharSet::new(alphabet).into()
}
pub fn parameters_dict<S: Into<String>>(fields: impl IntoIterator<Item = (S, Type)>) -> Type {
    ParametersDict::new(fields.into_iter().map(|(k, t)| (k.into(), t)).collect()).into()
}

/// Panics with fewer than two parts.
pub fn and(parts: impl IntoIterator<Item = Type>) -> Type {
    AllOf::new(parts.into_iter().collect()).expect("And needs two or more types").into()
}
/// Panics with fewer than two parts.
pub fn or(parts: impl IntoIterator<Item = Type>) -> Type {
    AnyOf::new(parts.into_iter().collect()).expect("Or needs two or more types").into()
}
pub fn not(t: Type) -> Type {
    Not::new(t).into()
}
pub fn maybe(t: Type) -> Type {
    Maybe::new(t).into()
}

pub fn boolean() -> Type {
    Boolean.into()
}
pub fn function() -> Type {
    Function.into()
}
pub fn constant(v: Value) -> Type {
    Constant::new(v).into()
}
pub fn nothing() -> Type {
    Constant::nothing().into()
}
pub fn unchecked() -> Type {
    Unchecked.into()
}
pub fn void() -> Type {
    Void.into()
}

/// Host-defined nominal type, membership by instance-of with subtypes.
pub fn nominal(tag: impl Into<String>) -> NominalAdapter {
    NominalAdapter::new(tag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_per_seed() {
        let t = list(number());
        let a: Vec<_> = t.generate(9, 40).collect();
        let b: Vec<_> = t.generate(9, 40).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
    }

    #[test]
    fn range_stream_starts_with_boundary() {
        let t = range(-1.0, 1.0);
        let head: Vec<_> = t.generate(3, 3).collect();
        assert_eq!(head, alloc::vec![Value::Float(-1.0), Value::Float(1.0), Value::Float(0.0)]);
        for v in t.generate(3, 200) {
            let x = v.as_f64().unwrap();
            assert!((-1.0..=1.0).contains(&x), "{x}");
        }
    }

    #[test]
    fn ungeneratable_types_emit_nothing() {
        assert_eq!(void().generate(0, 10).count(), 0);
        assert_eq!(unchecked().generate(0, 10).count(), 0);
        assert_eq!(function().generate(0, 10).count(), 0);
        assert_eq!(Type::from(nominal("Graph")).generate(0, 10).count(), 0);
    }

    #[test]
    fn constant_none_emits_once() {
        let out: Vec<_> = constant(Value::None).generate(4, 10).collect();
        assert_eq!(out, alloc::vec![Value::None]);
    }

    #[test]
    fn zero_count_emits_nothing() {
        assert_eq!(number().generate(0, 0).count(), 0);
    }
}
