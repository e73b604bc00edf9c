//! The dynamic value universe that contracts inspect.
//!
//! Every argument, return value and intermediate result of a condition
//! expression is a [`Value`]. Cloning a value deep-copies everything except
//! [`Handle`] payloads, which are shared host references; use
//! [`Value::deep_snapshot`] when an independent copy is required.

use alloc::borrow::ToOwned;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::any::Any;
use core::cmp::Ordering;
use core::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive};
use thiserror::Error;

/// Discriminant of a [`Value`], used in error messages and type checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    None,
    Bool,
    Int,
    Float,
    Text,
    Seq,
    Tuple,
    Map,
    NdArray,
    Handle,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tag::None => "none",
            Tag::Bool => "bool",
            Tag::Int => "int",
            Tag::Float => "float",
            Tag::Text => "text",
            Tag::Seq => "sequence",
            Tag::Tuple => "tuple",
            Tag::Map => "mapping",
            Tag::NdArray => "ndarray",
            Tag::Handle => "host handle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValueError {
    #[error("host handle of type `{0}` has no snapshot hook")]
    SnapshotUnsupported(String),
    #[error("array shape {shape:?} needs {expected} elements, got {got}")]
    ShapeMismatch {
        shape: Vec<usize>,
        expected: usize,
        got: usize,
    },
    #[error("unhashable mapping key {0}")]
    UnhashableKey(String),
    #[error("expected {expected}, found {found}")]
    Expected { expected: &'static str, found: Tag },
}

/// A dynamically tagged value.
#[derive(Clone)]
pub enum Value {
    None,
    Bool(bool),
    Int(BigInt),
    Float(f64),
    Text(String),
    Seq(Vec<Value>),
    Tuple(Vec<Value>),
    Map(Map),
    NdArray(NdArray),
    Handle(Handle),
}

impl Value {
    pub fn tag(&self) -> Tag {
        match self {
            Value::None => Tag::None,
            Value::Bool(_) => Tag::Bool,
            Value::Int(_) => Tag::Int,
            Value::Float(_) => Tag::Float,
            Value::Text(_) => Tag::Text,
            Value::Seq(_) => Tag::Seq,
            Value::Tuple(_) => Tag::Tuple,
            Value::Map(_) => Tag::Map,
            Value::NdArray(_) => Tag::NdArray,
            Value::Handle(_) => Tag::Handle,
        }
    }

    pub fn int(i: i64) -> Value {
        Value::Int(BigInt::from(i))
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    /// A sequence of one-character texts, the usual encoding of a list of chars.
    pub fn chars(s: &str) -> Value {
        Value::Seq(s.chars().map(|c| Value::Text(c.to_string())).collect())
    }

    pub fn floats(xs: &[f64]) -> Value {
        Value::Seq(xs.iter().map(|&x| Value::Float(x)).collect())
    }

    /// `true` for `Int` and `Float` (booleans are not numbers here).
    pub fn is_numeric(&self) -> bool {
        matches!(self, Value::Int(_) | Value::Float(_))
    }

    /// Numeric value as a double; `None` for non-numeric tags.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(i.to_f64().unwrap_or(f64::NAN)),
            Value::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_int().and_then(ToPrimitive::to_i64)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Elements of a `Seq` or `Tuple`.
    pub fn as_items(&self) -> Option<&[Value]> {
        match self {
            Value::Seq(v) | Value::Tuple(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_items_mut(&mut self) -> Option<&mut Vec<Value>> {
        match self {
            Value::Seq(v) | Value::Tuple(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&NdArray> {
        match self {
            Value::NdArray(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&Map> {
        match self {
            Value::Map(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_handle(&self) -> Option<&Handle> {
        match self {
            Value::Handle(h) => Some(h),
            _ => None,
        }
    }

    pub fn expect_f64(&self) -> Result<f64, ValueError> {
        self.as_f64().ok_or(ValueError::Expected {
            expected: "number",
            found: self.tag(),
        })
    }

    pub fn expect_items(&self) -> Result<&[Value], ValueError> {
        self.as_items().ok_or(ValueError::Expected {
            expected: "sequence or tuple",
            found: self.tag(),
        })
    }

    pub fn expect_text(&self) -> Result<&str, ValueError> {
        self.as_text().ok_or(ValueError::Expected {
            expected: "text",
            found: self.tag(),
        })
    }

    pub fn expect_array(&self) -> Result<&NdArray, ValueError> {
        self.as_array().ok_or(ValueError::Expected {
            expected: "ndarray",
            found: self.tag(),
        })
    }

    /// Copy that shares no mutable substructure with `self`.
    ///
    /// Handles are copied through their snapshot hook; a handle without one
    /// makes the whole snapshot fail.
    pub fn deep_snapshot(&self) -> Result<Value, ValueError> {
        Ok(match self {
            Value::Seq(items) => Value::Seq(snapshot_items(items)?),
            Value::Tuple(items) => Value::Tuple(snapshot_items(items)?),
            Value::Map(m) => {
                let mut entries = Vec::with_capacity(m.entries.len());
                for (k, v) in &m.entries {
                    entries.push((k.deep_snapshot()?, v.deep_snapshot()?));
                }
                Value::Map(Map { entries })
            }
            Value::Handle(h) => Value::Handle(h.snapshot()?),
            other => other.clone(),
        })
    }

    /// Like [`Value::deep_snapshot`], but falls back to a by-reference copy.
    /// The flag is `true` when the fallback was taken.
    pub fn snapshot_or_shallow(&self) -> (Value, bool) {
        match self.deep_snapshot() {
            Ok(v) => (v, false),
            Err(_) => (self.clone(), true),
        }
    }

    /// Whether this value may be used as a mapping key.
    pub fn is_hashable(&self) -> bool {
        match self {
            Value::None | Value::Bool(_) | Value::Int(_) | Value::Text(_) => true,
            Value::Float(f) => !f.is_nan(),
            Value::Tuple(items) => items.iter().all(Value::is_hashable),
            _ => false,
        }
    }

    /// Deterministic human-readable rendering.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn snapshot_items(items: &[Value]) -> Result<Vec<Value>, ValueError> {
    items.iter().map(Value::deep_snapshot).collect()
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::int(i)
    }
}

impl From<i32> for Value {
    fn from(i: i32) -> Self {
        Value::int(i64::from(i))
    }
}

impl From<BigInt> for Value {
    fn from(i: BigInt) -> Self {
        Value::Int(i)
    }
}

impl From<f64> for Value {
    fn from(f: f64) -> Self {
        Value::Float(f)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<Vec<Value>> for Value {
    fn from(v: Vec<Value>) -> Self {
        Value::Seq(v)
    }
}

impl From<NdArray> for Value {
    fn from(a: NdArray) -> Self {
        Value::NdArray(a)
    }
}

impl From<Map> for Value {
    fn from(m: Map) -> Self {
        Value::Map(m)
    }
}

impl From<Handle> for Value {
    fn from(h: Handle) -> Self {
        Value::Handle(h)
    }
}

/// Structural equality with numeric interop: `Int 2 == Float 2.0`, NaN is
/// never equal to anything, and `Seq` never equals `Tuple`.
pub fn value_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::None, Value::None) => true,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Int(_) | Value::Float(_), Value::Int(_) | Value::Float(_)) => {
            numeric_cmp(a, b) == Some(Ordering::Equal)
        }
        (Value::Text(x), Value::Text(y)) => x == y,
        (Value::Seq(x), Value::Seq(y)) | (Value::Tuple(x), Value::Tuple(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(p, q)| value_eq(p, q))
        }
        (Value::Map(x), Value::Map(y)) => {
            x.len() == y.len()
                && x.iter()
                    .all(|(k, v)| y.get(k).is_some_and(|w| value_eq(v, w)))
        }
        (Value::NdArray(x), Value::NdArray(y)) => {
            x.shape == y.shape && x.data.iter().zip(&y.data).all(|(p, q)| p == q)
        }
        (Value::Handle(x), Value::Handle(y)) => x.same_object(y),
        _ => false,
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        value_eq(self, other)
    }
}

/// Ordering between two numeric values; `None` if either is NaN or non-numeric.
pub fn numeric_cmp(a: &Value, b: &Value) -> Option<Ordering> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(x.cmp(y)),
        (Value::Float(x), Value::Float(y)) => x.partial_cmp(y),
        (Value::Int(x), Value::Float(y)) => cmp_int_float(x, *y),
        (Value::Float(x), Value::Int(y)) => cmp_int_float(y, *x).map(Ordering::reverse),
        _ => None,
    }
}

fn cmp_int_float(i: &BigInt, f: f64) -> Option<Ordering> {
    if f.is_nan() {
        return None;
    }
    if f.is_infinite() {
        return Some(if f > 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        });
    }
    let floor = libm::floor(f);
    let fi = BigInt::from_f64(floor)?;
    match i.cmp(&fi) {
        Ordering::Equal if f > floor => Some(Ordering::Less),
        o => Some(o),
    }
}

/// Ordering used by condition comparisons. Numbers compare across `Int` and
/// `Float`; texts lexicographically; sequences and tuples lexicographically
/// within the same tag. Anything else is unordered.
pub fn value_cmp(a: &Value, b: &Value) -> Result<Option<Ordering>, (Tag, Tag)> {
    match (a, b) {
        (Value::Int(_) | Value::Float(_), Value::Int(_) | Value::Float(_)) => {
            Ok(numeric_cmp(a, b))
        }
        (Value::Text(x), Value::Text(y)) => Ok(Some(x.cmp(y))),
        (Value::Seq(x), Value::Seq(y)) | (Value::Tuple(x), Value::Tuple(y)) => {
            for (p, q) in x.iter().zip(y) {
                match value_cmp(p, q)? {
                    Some(Ordering::Equal) => continue,
                    other => return Ok(other),
                }
            }
            Ok(Some(x.len().cmp(&y.len())))
        }
        _ => Err((a.tag(), b.tag())),
    }
}

/// Row-major n-dimensional array of doubles.
#[derive(Clone, Debug, Default)]
pub struct NdArray {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl NdArray {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, ValueError> {
        let expected = shape.iter().product::<usize>();
        if expected != data.len() {
            return Err(ValueError::ShapeMismatch {
                shape,
                expected,
                got: data.len(),
            });
        }
        Ok(NdArray { shape, data })
    }

    /// Rank-1 array.
    pub fn from_vec(data: Vec<f64>) -> Self {
        NdArray {
            shape: alloc::vec![data.len()],
            data,
        }
    }

    pub fn filled(shape: Vec<usize>, x: f64) -> Self {
        let n = shape.iter().product();
        NdArray {
            shape,
            data: alloc::vec![x; n],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Elementwise map preserving shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> NdArray {
        NdArray {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Extent of the first axis (`1` for rank-0 arrays).
    pub fn outer_len(&self) -> usize {
        self.shape.first().copied().unwrap_or(1)
    }

    /// The `i`-th slice along the first axis: a scalar for rank-1 arrays,
    /// otherwise an array of rank one lower.
    pub fn outer(&self, i: usize) -> Option<Value> {
        match self.shape.len() {
            0 => None,
            1 => self.data.get(i).map(|&x| Value::Float(x)),
            _ => {
                if i >= self.shape[0] {
                    return None;
                }
                let inner: usize = self.shape[1..].iter().product();
                Some(Value::NdArray(NdArray {
                    shape: self.shape[1..].to_vec(),
                    data: self.data[i * inner..(i + 1) * inner].to_vec(),
                }))
            }
        }
    }

    /// Array made of the given first-axis slices of `self`.
    pub fn select_outer(&self, idx: &[usize]) -> NdArray {
        let inner: usize = self.shape.iter().skip(1).product();
        let mut data = Vec::with_capacity(idx.len() * inner);
        for &i in idx {
            data.extend_from_slice(&self.data[i * inner..(i + 1) * inner]);
        }
        let mut shape = self.shape.clone();
        if let Some(first) = shape.first_mut() {
            *first = idx.len();
        }
        NdArray { shape, data }
    }
}

/// Association from hashable keys to values, in insertion order.
#[derive(Clone, Default)]
pub struct Map {
    entries: Vec<(Value, Value)>,
}

impl Map {
    pub fn new() -> Self {
        Map::default()
    }

    /// Inserts or replaces; returns the previous value for an equal key.
    pub fn insert(&mut self, key: Value, value: Value) -> Result<Option<Value>, ValueError> {
        if !key.is_hashable() {
            return Err(ValueError::UnhashableKey(key.render()));
        }
        if let Some(slot) = self.entries.iter_mut().find(|(k, _)| value_eq(k, &key)) {
            return Ok(Some(core::mem::replace(&mut slot.1, value)));
        }
        self.entries.push((key, value));
        Ok(None)
    }

    pub fn get(&self, key: &Value) -> Option<&Value> {
        self.entries
            .iter()
            .find(|(k, _)| value_eq(k, key))
            .map(|(_, v)| v)
    }

    pub fn remove(&mut self, key: &Value) -> Option<Value> {
        let pos = self.entries.iter().position(|(k, _)| value_eq(k, key))?;
        Some(self.entries.remove(pos).1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Value, &Value)> {
        self.entries.iter().map(|(k, v)| (k, v))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&Value, &mut Value)> {
        self.entries.iter_mut().map(|(k, v)| (&*k, v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &Value> {
        self.entries.iter().map(|(k, _)| k)
    }
}

impl Map {
    /// Builds a map from entries, failing on the first unhashable key.
    pub fn from_entries(entries: impl IntoIterator<Item = (Value, Value)>) -> Result<Map, ValueError> {
        let mut m = Map::new();
        for (k, v) in entries {
            m.insert(k, v)?;
        }
        Ok(m)
    }
}

pub type Payload = Arc<dyn Any + Send + Sync>;
pub type SnapshotHook = Arc<dyn Fn(&Payload) -> Payload + Send + Sync>;

/// Opaque reference to a host object.
///
/// `type_chain` lists the object's nominal type first, followed by its
/// supertypes; nominal checks accept a handle when the wanted tag appears
/// anywhere in the chain.
#[derive(Clone)]
pub struct Handle {
    type_chain: Arc<[String]>,
    payload: Payload,
    snapshot: Option<SnapshotHook>,
    callable: bool,
}

impl Handle {
    pub fn new<S: Into<String>>(
        type_chain: impl IntoIterator<Item = S>,
        payload: impl Any + Send + Sync,
    ) -> Self {
        Handle {
            type_chain: type_chain.into_iter().map(Into::into).collect(),
            payload: Arc::new(payload),
            snapshot: None,
            callable: false,
        }
    }

    /// Reference to a callable host object, e.g. a registered function.
    pub fn function(name: impl Into<String>) -> Self {
        let name = name.into();
        Handle {
            type_chain: Arc::from([String::from("function")]),
            payload: Arc::new(name),
            snapshot: None,
            callable: true,
        }
    }

    pub fn with_snapshot(mut self, hook: impl Fn(&Payload) -> Payload + Send + Sync + 'static) -> Self {
        self.snapshot = Some(Arc::new(hook));
        self
    }

    /// Snapshot hook that clones a `T` payload.
    pub fn with_clone_snapshot<T: Any + Clone + Send + Sync>(self) -> Self {
        self.with_snapshot(|p| match p.downcast_ref::<T>() {
            Some(t) => Arc::new(t.clone()) as Payload,
            None => p.clone(),
        })
    }

    pub fn type_name(&self) -> &str {
        self.type_chain.first().map_or("object", String::as_str)
    }

    pub fn type_chain(&self) -> &[String] {
        &self.type_chain
    }

    pub fn is_instance_of(&self, tag: &str) -> bool {
        self.type_chain.iter().any(|t| t == tag)
    }

    pub fn is_callable(&self) -> bool {
        self.callable
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn downcast_ref<T: Any>(&self) -> Option<&T> {
        self.payload.downcast_ref::<T>()
    }

    pub fn same_object(&self, other: &Handle) -> bool {
        Arc::ptr_eq(&self.payload, &other.payload)
    }

    fn snapshot(&self) -> Result<Handle, ValueError> {
        let hook = self
            .snapshot
            .as_ref()
            .ok_or_else(|| ValueError::SnapshotUnsupported(self.type_name().to_owned()))?;
        Ok(Handle {
            type_chain: self.type_chain.clone(),
            payload: hook(&self.payload),
            snapshot: self.snapshot.clone(),
            callable: self.callable,
        })
    }
}

impl fmt::Debug for Handle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Handle({:?})", self.type_chain)
    }
}

const ARRAY_RENDER_LIMIT: usize = 8;

pub(crate) fn write_float(out: &mut impl fmt::Write, x: f64) -> fmt::Result {
    if x.is_nan() {
        out.write_str("nan")
    } else if x.is_infinite() {
        out.write_str(if x > 0.0 { "inf" } else { "-inf" })
    } else {
        write!(out, "{x:?}")
    }
}

fn write_array_elem(out: &mut impl fmt::Write, x: f64) -> fmt::Result {
    let mut s = String::new();
    write_float(&mut s, x)?;
    out.write_str(s.strip_suffix(".0").unwrap_or(&s))
}

fn write_text_repr(out: &mut impl fmt::Write, s: &str) -> fmt::Result {
    out.write_char('\'')?;
    for c in s.chars() {
        match c {
            '\'' => out.write_str("\\'")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\t' => out.write_str("\\t")?,
            c => out.write_char(c)?,
        }
    }
    out.write_char('\'')
}

fn write_joined(f: &mut fmt::Formatter<'_>, items: &[Value]) -> fmt::Result {
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::None => f.write_str("None"),
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write_float(f, *x),
            Value::Text(s) => write_text_repr(f, s),
            Value::Seq(items) => {
                f.write_char('[')?;
                write_joined(f, items)?;
                f.write_char(']')
            }
            Value::Tuple(items) => {
                f.write_char('(')?;
                write_joined(f, items)?;
                if items.len() == 1 {
                    f.write_char(',')?;
                }
                f.write_char(')')
            }
            Value::Map(m) => {
                f.write_char('{')?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_char('}')
            }
            Value::NdArray(a) => {
                f.write_str("NdArray(")?;
                for (i, d) in a.shape.iter().enumerate() {
                    if i > 0 {
                        f.write_char('×')?;
                    }
                    write!(f, "{d}")?;
                }
                f.write_str(")[")?;
                for (i, &x) in a.data.iter().take(ARRAY_RENDER_LIMIT).enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_array_elem(f, x)?;
                }
                if a.data.len() > ARRAY_RENDER_LIMIT {
                    write!(f, ", … {} more", a.data.len() - ARRAY_RENDER_LIMIT)?;
                }
                f.write_char(']')
            }
            Value::Handle(h) if h.callable => match h.downcast_ref::<String>() {
                Some(name) => write!(f, "<function {name}>"),
                None => f.write_str("<function>"),
            },
            Value::Handle(h) => write!(f, "<{}>", h.type_name()),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Whether a double holds an integral value.
pub(crate) fn is_integral(x: f64) -> bool {
    x.is_finite() && libm::trunc(x) == x
}
