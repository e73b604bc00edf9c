//! Greedy failure minimization.
//!
//! Values are ordered by `(node count, magnitude)`: fewer container
//! elements first, then a smaller sum of absolute numeric values and text
//! lengths. A candidate replaces the current arguments only when it is
//! strictly smaller and still fails the same way.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use refineguard_core::checker::Arguments;
use refineguard_core::{NdArray, Value};

const MAX_ATTEMPTS: usize = 2000;

pub fn size(v: &Value) -> (usize, f64) {
    match v {
        Value::Int(i) => (1, bigint_mag(i)),
        Value::Float(x) if x.is_finite() => (1, x.abs()),
        Value::Float(_) => (1, f64::MAX),
        Value::Text(s) => (1, s.chars().count() as f64),
        Value::Seq(items) | Value::Tuple(items) => items.iter().map(size).fold((1, 0.0), add),
        Value::Map(m) => m.iter().map(|(k, v)| add(size(k), size(v))).fold((1, 0.0), add),
        Value::NdArray(a) => (1 + a.len() + a.rank(), a.data().iter().map(|x| x.abs().min(f64::MAX)).sum()),
        Value::None | Value::Bool(false) | Value::Handle(_) => (1, 0.0),
        Value::Bool(true) => (1, 1.0),
    }
}

pub fn args_size(args: &Arguments) -> (usize, f64) {
    args.iter().map(|(_, v)| size(v)).fold((0, 0.0), add)
}

fn add(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    (a.0 + b.0, a.1 + b.1)
}

fn smaller(a: (usize, f64), b: (usize, f64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn bigint_mag(i: &BigInt) -> f64 {
    i.to_f64().map_or(f64::MAX, f64::abs)
}

/// Simpler variants of `v`, most aggressive first.
pub fn candidates(v: &Value) -> Vec<Value> {
    let mut out = Vec::new();
    match v {
        Value::Int(i) => {
            let zero = BigInt::from(0);
            if *i != zero {
                out.push(Value::Int(zero));
                out.push(Value::Int(i / 2));
                out.push(Value::Int(i - i.signum()));
                if *i < BigInt::from(0) {
                    out.push(Value::Int(-i));
                }
            }
        }
        Value::Float(x) => {
            let x = *x;
            if x.is_finite() && x != 0.0 {
                out.extend([0.0, x.trunc(), x / 2.0, x.signum()].into_iter().map(Value::Float));
                if x < 0.0 {
                    out.push(Value::Float(-x));
                }
            }
        }
        Value::Bool(true) => out.push(Value::Bool(false)),
        Value::Text(s) if !s.is_empty() => {
            let chars: Vec<char> = s.chars().collect();
            out.push(Value::text(""));
            out.push(Value::text(chars[..chars.len() / 2].iter().collect::<String>()));
            for i in 0..chars.len() {
                let mut c = chars.clone();
                c.remove(i);
                out.push(Value::text(c.into_iter().collect::<String>()));
            }
        }
        Value::Seq(items) => {
            if !items.is_empty() {
                out.push(Value::Seq(Vec::new()));
                out.push(Value::Seq(items[..items.len() / 2].to_vec()));
                out.push(Value::Seq(items[items.len() / 2..].to_vec()));
                for i in 0..items.len() {
                    let mut c = items.clone();
                    c.remove(i);
                    out.push(Value::Seq(c));
                }
            }
            out.extend(elementwise(items).into_iter().map(Value::Seq));
        }
        Value::Tuple(items) => out.extend(elementwise(items).into_iter().map(Value::Tuple)),
        Value::Map(m) => {
            for k in m.keys() {
                let mut c = m.clone();
                c.remove(k);
                out.push(Value::Map(c));
            }
            for (idx, (_, v)) in m.iter().enumerate() {
                for s in candidates(v) {
                    let mut c = m.clone();
                    if let Some((_, slot)) = c.iter_mut().nth(idx) {
                        *slot = s;
                    }
                    out.push(Value::Map(c));
                }
            }
        }
        Value::NdArray(a) => out.extend(array_candidates(a).into_iter().map(Value::NdArray)),
        _ => {}
    }
    out
}

fn elementwise(items: &[Value]) -> Vec<Vec<Value>> {
    let mut out = Vec::new();
    for (i, v) in items.iter().enumerate() {
        for s in candidates(v) {
            let mut c = items.to_vec();
            c[i] = s;
            out.push(c);
        }
    }
    out
}

fn array_candidates(a: &NdArray) -> Vec<NdArray> {
    let mut out = Vec::new();
    let data = a.data();
    if a.rank() != 1 || a.len() > 1 {
        if let Some(&x) = data.first() {
            out.push(NdArray::from_vec(vec![x]));
        }
        if a.rank() != 1 {
            out.push(NdArray::from_vec(data.to_vec()));
        }
    }
    let n = a.outer_len();
    if n > 1 {
        out.push(a.select_outer(&(0..n / 2).collect::<Vec<_>>()));
        out.push(a.select_outer(&(n / 2..n).collect::<Vec<_>>()));
        for i in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            out.push(a.select_outer(&keep));
        }
    }
    for (i, &x) in data.iter().enumerate() {
        if x.is_finite() && x != 0.0 {
            for y in [0.0, x.trunc(), x / 2.0] {
                if y != x {
                    let mut c = a.clone();
                    c.data_mut()[i] = y;
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Repeatedly replaces one argument with a smaller candidate for which
/// `still_fails` holds, until no candidate helps.
pub fn shrink(args: &Arguments, mut still_fails: impl FnMut(&Arguments) -> bool) -> Arguments {
    let mut best = args.clone();
    let mut attempts = 0;
    'outer: loop {
        for i in 0..best.len() {
            for c in candidates(&best[i]) {
                if attempts >= MAX_ATTEMPTS {
                    break 'outer;
                }
                let mut trial = best.clone();
                trial[i] = c;
                if !smaller(args_size(&trial), args_size(&best)) {
                    continue;
                }
                attempts += 1;
                if still_fails(&trial) {
                    best = trial;
                    continue 'outer;
                }
            }
        }
        break;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_move_to_zero() {
        let a = Arguments::new().with("x", 0.37);
        let s = shrink(&a, |t| t["x"].as_f64().unwrap() <= 1.0);
        assert_eq!(s["x"].as_f64(), Some(0.0));
    }

    #[test]
    fn minimal_input_is_a_fixpoint() {
        let a = Arguments::new().with("x", 0i64).with("xs", Value::Seq(vec![]));
        assert_eq!(shrink(&a, |_| true), a);
    }

    #[test]
    fn lists_drop_irrelevant_elements() {
        let xs = Value::Seq([5i64, -3, 8, 2].into_iter().map(Value::int).collect());
        let a = Arguments::new().with("xs", xs);
        let s = shrink(&a, |t| {
            t["xs"].as_items().unwrap().iter().any(|v| v.as_i64().is_some_and(|x| x < 0))
        });
        assert_eq!(s["xs"].render(), "[-1]");
    }

    #[test]
    fn arrays_reach_one_element() {
        let a = NdArray::new(vec![2, 2], vec![3.0, 1.5, -2.0, 4.0]).unwrap();
        let args = Arguments::new().with("a", a);
        let s = shrink(&args, |t| !t["a"].as_array().unwrap().is_empty());
        let got = s["a"].as_array().unwrap();
        assert_eq!(got.shape(), &[1]);
        assert_eq!(got.data(), &[0.0]);
    }

    #[test]
    fn handles_are_left_alone() {
        let h = Value::Handle(refineguard_core::Handle::new(["Graph"], ()));
        assert!(candidates(&h).is_empty());
    }
}
