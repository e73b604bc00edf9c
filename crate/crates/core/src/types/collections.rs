use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::{draw, gen_len, join_names, Offender, PredicateError, Refinement, Type, MAX_GEN_DEPTH, MAX_GEN_LEN};
use crate::value::{is_integral, value_eq, Map, NdArray, Value};

/// Index path segment for an element of a container.
fn nest(prefix: String, inner: Option<Offender>, value: &Value) -> Offender {
    match inner {
        Some(o) => Offender {
            path: prefix + &o.path,
            value: o.value,
        },
        None => Offender {
            path: prefix,
            value: value.clone(),
        },
    }
}

fn first_failing<'a>(
    t: &Type,
    items: impl Iterator<Item = (String, &'a Value)>,
) -> Result<Option<Offender>, PredicateError> {
    for (path, v) in items {
        if !t.check(v)? {
            return Ok(Some(nest(path, t.offender(v)?, v)));
        }
    }
    Ok(None)
}

/// Fixed-length tuple with per-position types.
#[derive(Clone)]
pub struct TupleOf {
    parts: Vec<Type>,
}

impl TupleOf {
    pub fn new(parts: Vec<Type>) -> Self {
        TupleOf { parts }
    }
}

impl Refinement for TupleOf {
    fn name(&self) -> String {
        format!("Tuple({})", join_names(&self.parts))
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        let Value::Tuple(items) = v else {
            return Ok(false);
        };
        if items.len() != self.parts.len() {
            return Ok(false);
        }
        for (t, x) in self.parts.iter().zip(items) {
            if !t.check(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn boundary(&self) -> Vec<Value> {
        let firsts: Option<Vec<Value>> = self
            .parts
            .iter()
            .map(|t| t.boundary().into_iter().find(|b| t.accepts(b)))
            .collect();
        firsts.map(|xs| vec![Value::Tuple(xs)]).unwrap_or_default()
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        let items: Option<Vec<Value>> = self.parts.iter().map(|t| draw(t, rng, depth + 1)).collect();
        items.map(Value::Tuple)
    }

    fn offender(&self, v: &Value) -> Result<Option<Offender>, PredicateError> {
        match v {
            Value::Tuple(items) if items.len() == self.parts.len() => {
                for (i, (t, x)) in self.parts.iter().zip(items).enumerate() {
                    if !t.check(x)? {
                        return Ok(Some(nest(format!("[{i}]"), t.offender(x)?, x)));
                    }
                }
                Ok(None)
            }
            _ => Ok(None),
        }
    }
}

/// Sequence whose elements all satisfy one type.
#[derive(Clone)]
pub struct ListOf {
    elem: Type,
}

impl ListOf {
    pub fn new(elem: Type) -> Self {
        ListOf { elem }
    }
}

fn element_boundary(t: &Type, n: usize) -> Vec<Value> {
    t.boundary().into_iter().filter(|b| t.accepts(b)).take(n).collect()
}

impl Refinement for ListOf {
    fn name(&self) -> String {
        format!("List({})", self.elem.name())
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        let Value::Seq(items) = v else {
            return Ok(false);
        };
        for x in items {
            if !self.elem.check(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn boundary(&self) -> Vec<Value> {
        let elems = element_boundary(&self.elem, 3);
        let mut out = vec![Value::Seq(Vec::new())];
        out.extend(elems.iter().map(|b| Value::Seq(vec![b.clone()])));
        if elems.len() > 1 {
            out.push(Value::Seq(elems));
        }
        out
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        let n = gen_len(rng, depth);
        let mut items = Vec::with_capacity(n);
        for _ in 0..n {
            items.push(draw(&self.elem, rng, depth + 1)?);
        }
        Some(Value::Seq(items))
    }

    fn offender(&self, v: &Value) -> Result<Option<Offender>, PredicateError> {
        match v {
            Value::Seq(items) => first_failing(
                &self.elem,
                items.iter().enumerate().map(|(i, x)| (format!("[{i}]"), x)),
            ),
            _ => Ok(None),
        }
    }
}

/// Mapping whose keys and values all satisfy the given types.
#[derive(Clone)]
pub struct DictOf {
    key: Type,
    value: Type,
}

impl DictOf {
    pub fn new(key: Type, value: Type) -> Self {
        DictOf { key, value }
    }
}

impl Refinement for DictOf {
    fn name(&self) -> String {
        format!("Dict({}, {})", self.key.name(), self.value.name())
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        let Value::Map(m) = v else {
            return Ok(false);
        };
        for (k, x) in m.iter() {
            if !self.key.check(k)? || !self.value.check(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn boundary(&self) -> Vec<Value> {
        let mut out = vec![Value::Map(Map::new())];
        let keys = element_boundary(&self.key, 2);
        let vals = element_boundary(&self.value, 2);
        for k in &keys {
            for x in &vals {
                let mut m = Map::new();
                if m.insert(k.clone(), x.clone()).is_ok() {
                    out.push(Value::Map(m));
                }
            }
        }
        out
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        let n = gen_len(rng, depth);
        let mut m = Map::new();
        for _ in 0..n {
            let k = draw(&self.key, rng, depth + 1)?;
            let x = draw(&self.value, rng, depth + 1)?;
            let _ = m.insert(k, x);
        }
        Some(Value::Map(m))
    }

    fn offender(&self, v: &Value) -> Result<Option<Offender>, PredicateError> {
        let Value::Map(m) = v else {
            return Ok(None);
        };
        for (k, x) in m.iter() {
            if !self.key.check(k)? {
                return Ok(Some(Offender {
                    path: format!("key {k}"),
                    value: k.clone(),
                }));
            }
            if !self.value.check(x)? {
                return Ok(Some(nest(format!("[{k}]"), self.value.offender(x)?, x)));
            }
        }
        Ok(None)
    }
}

/// Unordered collection of distinct members, carried as a sequence without
/// duplicates.
#[derive(Clone)]
pub struct SetOf {
    elem: Type,
}

impl SetOf {
    pub fn new(elem: Type) -> Self {
        SetOf { elem }
    }
}

impl Refinement for SetOf {
    fn name(&self) -> String {
        format!("Set({})", self.elem.name())
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        let Value::Seq(items) = v else {
            return Ok(false);
        };
        for (i, x) in items.iter().enumerate() {
            if !self.elem.check(x)? || items[..i].iter().any(|y| value_eq(x, y)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn boundary(&self) -> Vec<Value> {
        let elems = element_boundary(&self.elem, 3);
        let mut out = vec![Value::Seq(Vec::new())];
        out.extend(elems.iter().map(|b| Value::Seq(vec![b.clone()])));
        out
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        let n = gen_len(rng, depth);
        let mut items: Vec<Value> = Vec::with_capacity(n);
        for _ in 0..n * 2 {
            if items.len() == n {
                break;
            }
            let x = draw(&self.elem, rng, depth + 1)?;
            if !items.iter().any(|y| value_eq(&x, y)) {
                items.push(x);
            }
        }
        Some(Value::Seq(items))
    }

    fn offender(&self, v: &Value) -> Result<Option<Offender>, PredicateError> {
        let Value::Seq(items) = v else {
            return Ok(None);
        };
        for (i, x) in items.iter().enumerate() {
            if !self.elem.check(x)? {
                return Ok(Some(nest(format!("[{i}]"), self.elem.offender(x)?, x)));
            }
            if items[..i].iter().any(|y| value_eq(x, y)) {
                return Ok(Some(Offender {
                    path: format!("[{i}] (duplicate)"),
                    value: x.clone(),
                }));
            }
        }
        Ok(None)
    }
}

/// Mapping from text keys to typed values, where any subset of the
/// declared keys may be present and no other key may.
#[derive(Clone)]
pub struct ParametersDict {
    fields: Vec<(String, Type)>,
}

impl ParametersDict {
    pub fn new(fields: Vec<(String, Type)>) -> Self {
        ParametersDict { fields }
    }

    fn type_of(&self, key: &Value) -> Option<&Type> {
        let k = key.as_text()?;
        self.fields.iter().find(|(name, _)| name == k).map(|(_, t)| t)
    }
}

impl Refinement for ParametersDict {
    fn name(&self) -> String {
        let inner: Vec<String> = self
            .fields
            .iter()
            .map(|(k, t)| format!("{}: {}", Value::text(k.clone()), t.name()))
            .collect();
        format!("ParametersDict({{{}}})", inner.join(", "))
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        let Value::Map(m) = v else {
            return Ok(false);
        };
        for (k, x) in m.iter() {
            match self.type_of(k) {
                Some(t) if t.check(x)? => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    fn boundary(&self) -> Vec<Value> {
        let mut out = vec![Value::Map(Map::new())];
        let mut full = Map::new();
        let mut complete = true;
        for (k, t) in &self.fields {
            match element_boundary(t, 1).pop() {
                Some(b) => {
                    let mut single = Map::new();
                    let _ = single.insert(Value::text(k.clone()), b.clone());
                    out.push(Value::Map(single));
                    let _ = full.insert(Value::text(k.clone()), b);
                }
                None => complete = false,
            }
        }
        if complete && self.fields.len() > 1 {
            out.push(Value::Map(full));
        }
        out
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        let mut m = Map::new();
        for (k, t) in &self.fields {
            if rng.random_bool(0.5) {
                if let Some(x) = draw(t, rng, depth + 1) {
                    let _ = m.insert(Value::text(k.clone()), x);
                }
            }
        }
        Some(Value::Map(m))
    }

    fn offender(&self, v: &Value) -> Result<Option<Offender>, PredicateError> {
        let Value::Map(m) = v else {
            return Ok(None);
        };
        for (k, x) in m.iter() {
            match self.type_of(k) {
                None => {
                    return Ok(Some(Offender {
                        path: format!("key {k} (not a declared parameter)"),
                        value: k.clone(),
                    }))
                }
                Some(t) if !t.check(x)? => {
                    return Ok(Some(nest(format!("[{k}]"), t.offender(x)?, x)));
                }
                Some(_) => {}
            }
        }
        Ok(None)
    }
}

/// N-dimensional array, optionally with a fixed rank and an element type.
///
/// Elements are doubles; an integral element also satisfies integer-valued
/// element types such as `Natural0`.
#[derive(Clone, Default)]
pub struct NdArrayType {
    rank: Option<usize>,
    elem: Option<Type>,
}

impl NdArrayType {
    pub fn any() -> Self {
        NdArrayType::default()
    }

    /// Require exactly `rank` dimensions.
    pub fn dims(mut self, rank: usize) -> Self {
        self.rank = Some(rank);
        self
    }

    /// Require every element to satisfy `t`.
    pub fn elements(mut self, t: Type) -> Self {
        self.elem = Some(t);
        self
    }

    fn elem_ok(&self, x: f64) -> Result<bool, PredicateError> {
        let Some(t) = &self.elem else {
            return Ok(true);
        };
        if t.check(&Value::Float(x))? {
            return Ok(true);
        }
        if is_integral(x) {
            if let Some(i) = <num_bigint::BigInt as num_traits::FromPrimitive>::from_f64(x) {
                return t.check(&Value::Int(i));
            }
        }
        Ok(false)
    }

    fn elem_values(&self) -> Vec<f64> {
        match &self.elem {
            Some(t) => t
                .boundary()
                .iter()
                .filter_map(Value::as_f64)
                .filter(|&x| self.elem_ok(x).unwrap_or(false))
                .take(4)
                .collect(),
            None => vec![0.0, 1.0, -1.0, f64::NAN, f64::INFINITY],
        }
    }

    fn random_elem(&self, rng: &mut dyn RngCore, depth: u32) -> Option<f64> {
        match &self.elem {
            Some(t) => {
                for _ in 0..8 {
                    if let Some(x) = draw(t, rng, depth + 1).and_then(|v| v.as_f64()) {
                        if self.elem_ok(x).unwrap_or(false) {
                            return Some(x);
                        }
                    }
                }
                None
            }
            None => Some(match rng.random_range(0..20) {
                0 => f64::NAN,
                1 => f64::INFINITY,
                _ => rng.random_range(-100.0..100.0),
            }),
        }
    }
}

fn multi_index(shape: &[usize], mut flat: usize) -> String {
    let mut idx = vec![0usize; shape.len()];
    for (slot, &extent) in idx.iter_mut().zip(shape).rev() {
        if extent > 0 {
            *slot = flat % extent;
            flat /= extent;
        }
    }
    let parts: Vec<String> = idx.iter().map(|i| format!("{i}")).collect();
    format!("[{}]", parts.join(", "))
}

impl Refinement for NdArrayType {
    fn name(&self) -> String {
        let mut params = Vec::new();
        if let Some(d) = self.rank {
            params.push(format!("d={d}"));
        }
        if let Some(t) = &self.elem {
            params.push(format!("t={}", t.name()));
        }
        if params.is_empty() {
            String::from("NDArray")
        } else {
            format!("NDArray({})", params.join(", "))
        }
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        let Value::NdArray(a) = v else {
            return Ok(false);
        };
        if self.rank.is_some_and(|d| d != a.rank()) {
            return Ok(false);
        }
        for &x in a.data() {
            if !self.elem_ok(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn boundary(&self) -> Vec<Value> {
        let rank = self.rank.unwrap_or(1);
        let elems = self.elem_values();
        let mut out = vec![Value::NdArray(NdArray::filled(vec![0; rank], 0.0))];
        for &x in &elems {
            out.push(Value::NdArray(NdArray::filled(vec![1; rank], x)));
        }
        if !elems.is_empty() {
            let shape = vec![2; rank.max(1)];
            let shape = if rank == 0 { Vec::new() } else { shape };
            let n: usize = shape.iter().product();
            let data = (0..n).map(|i| elems[i % elems.len()]).collect();
            if let Ok(a) = NdArray::new(shape, data) {
                out.push(Value::NdArray(a));
            }
            if self.rank.is_none() {
                let data = (0..4).map(|i| elems[i % elems.len()]).collect();
                if let Ok(a) = NdArray::new(vec![2, 2], data) {
                    out.push(Value::NdArray(a));
                }
            }
        }
        out
    }

    fn sample(&self, rng: &mut dyn RngCore, depth: u32) -> Option<Value> {
        let rank = self.rank.unwrap_or_else(|| rng.random_range(1..=3));
        let max_extent = match rank {
            0 | 1 => MAX_GEN_LEN,
            2 => 4,
            _ => 3,
        };
        let shape: Vec<usize> = if depth >= MAX_GEN_DEPTH {
            vec![0; rank]
        } else {
            (0..rank).map(|_| rng.random_range(0..=max_extent)).collect()
        };
        let n: usize = shape.iter().product();
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            data.push(self.random_elem(rng, depth)?);
        }
        NdArray::new(shape, data).ok().map(Value::NdArray)
    }

    fn offender(&self, v: &Value) -> Result<Option<Offender>, PredicateError> {
        let Value::NdArray(a) = v else {
            return Ok(None);
        };
        for (i, &x) in a.data().iter().enumerate() {
            if !self.elem_ok(x)? {
                return Ok(Some(Offender {
                    path: multi_index(a.shape(), i),
                    value: Value::Float(x),
                }));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::*;

    fn arr(shape: &[usize], data: &[f64]) -> Value {
        Value::NdArray(NdArray::new(shape.to_vec(), data.to_vec()).unwrap())
    }

    #[test]
    fn dna_list_rejects_rna_base() {
        let t = list(set_chars("AGCT"));
        assert!(t.accepts(&Value::chars("ATC")));
        assert!(!t.accepts(&Value::chars("UCG")));
        let off = t.offender(&Value::chars("UCG")).unwrap().unwrap();
        assert_eq!(off.path, "[0]");
        assert_eq!(off.value, Value::text("U"));
    }

    #[test]
    fn ndarray_element_type() {
        let t: Type = ndarray().elements(range(-1.0, 1.0)).into();
        assert_eq!(t.name(), "NDArray(t=Range(-1, 1))");
        assert!(t.accepts(&arr(&[2, 2], &[0.5, -1.0, 1.0, 0.0])));
        assert!(!t.accepts(&arr(&[2, 2], &[0.5, -1.0, 1.5, 0.0])));
        let off = t.offender(&arr(&[2, 2], &[0.5, -1.0, 1.5, 0.0])).unwrap().unwrap();
        assert_eq!(off.path, "[1, 0]");
    }

    #[test]
    fn ndarray_rank_and_integral_elements() {
        let t: Type = ndarray().dims(2).elements(natural0()).into();
        assert!(t.accepts(&arr(&[1, 2], &[0.0, 3.0])));
        assert!(!t.accepts(&arr(&[2], &[0.0, 3.0])));
        assert!(!t.accepts(&arr(&[1, 2], &[0.5, 3.0])));
        assert!(t.is_generatable());
    }

    #[test]
    fn tuple_exact_arity() {
        let t = tuple([number(), string()]);
        assert!(t.accepts(&Value::Tuple(vec![Value::int(1), Value::text("x")])));
        assert!(!t.accepts(&Value::Tuple(vec![Value::int(1)])));
        assert!(!t.accepts(&Value::Seq(vec![Value::int(1), Value::text("x")])));
    }

    #[test]
    fn dict_checks_every_entry() {
        let t = dict(string(), number());
        let mut m = Map::new();
        m.insert(Value::text("a"), Value::int(1)).unwrap();
        m.insert(Value::text("b"), Value::Float(f64::NAN)).unwrap();
        assert!(!t.accepts(&Value::Map(m)));
    }

    #[test]
    fn set_rejects_duplicates() {
        let t = set_of(integer());
        assert!(t.accepts(&Value::Seq(vec![Value::int(1), Value::int(2)])));
        assert!(!t.accepts(&Value::Seq(vec![Value::int(1), Value::int(1)])));
    }

    #[test]
    fn parameters_dict_subsets() {
        let t = parameters_dict([("drift", number()), ("noise", positive())]);
        let mut m = Map::new();
        m.insert(Value::text("noise"), Value::Float(0.5)).unwrap();
        assert!(t.accepts(&Value::Map(m.clone())));
        m.insert(Value::text("other"), Value::int(1)).unwrap();
        assert!(!t.accepts(&Value::Map(m)));
        assert!(t.accepts(&Value::Map(Map::new())));
    }
}
