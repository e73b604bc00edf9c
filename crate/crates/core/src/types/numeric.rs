use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::{BigInt, Sign};
use rand::{Rng, RngCore};

use super::{fmt_num, PredicateError, Refinement, TypeError};
use crate::value::{numeric_cmp, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericKind {
    /// Any int or float.
    Numeric,
    /// Int or float, excluding NaN.
    ExtendedReal,
    /// Int or float, excluding NaN and ±inf.
    Number,
    Integer,
    /// Integer ≥ 0.
    Natural0,
    /// Integer > 0.
    Natural1,
    /// Number ≥ 0.
    Positive0,
    /// Number > 0.
    Positive,
}

#[derive(Debug, Clone)]
pub struct NumericType {
    kind: NumericKind,
}

impl NumericType {
    pub fn new(kind: NumericKind) -> Self {
        NumericType { kind }
    }
}

fn sign_of(v: &Value) -> Option<Sign> {
    match v {
        Value::Int(i) => Some(i.sign()),
        Value::Float(x) if *x > 0.0 => Some(Sign::Plus),
        Value::Float(x) if *x < 0.0 => Some(Sign::Minus),
        Value::Float(x) if *x == 0.0 => Some(Sign::NoSign),
        _ => None,
    }
}

fn is_finite_number(v: &Value) -> bool {
    match v {
        Value::Int(_) => true,
        Value::Float(x) => x.is_finite(),
        _ => false,
    }
}

fn random_int(rng: &mut dyn RngCore) -> BigInt {
    match rng.random_range(0..20) {
        0 => {
            let bits = rng.random_range(64..128u32);
            let mag = BigInt::from(1u8) << bits;
            let mag = mag + BigInt::from(rng.random::<u32>());
            if rng.random() {
                -mag
            } else {
                mag
            }
        }
        1..=5 => BigInt::from(rng.random_range(-1_000_000i64..=1_000_000)),
        _ => BigInt::from(rng.random_range(-100i64..=100)),
    }
}

/// Finite double spread over many magnitudes.
fn random_finite(rng: &mut dyn RngCore) -> f64 {
    match rng.random_range(0..4) {
        0 => rng.random_range(-1.0..1.0),
        1 => rng.random_range(-1e3..1e3),
        _ => {
            let exp: f64 = rng.random_range(-12.0..12.0);
            let mag = libm::pow(10.0, exp);
            if rng.random() {
                mag
            } else {
                -mag
            }
        }
    }
}

impl Refinement for NumericType {
    fn name(&self) -> String {
        format!("{:?}", self.kind)
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        use NumericKind::*;
        Ok(match self.kind {
            Numeric => v.is_numeric(),
            ExtendedReal => matches!(v, Value::Int(_)) || matches!(v, Value::Float(x) if !x.is_nan()),
            Number => is_finite_number(v),
            Integer => matches!(v, Value::Int(_)),
            Natural0 => matches!(v, Value::Int(i) if i.sign() != Sign::Minus),
            Natural1 => matches!(v, Value::Int(i) if i.sign() == Sign::Plus),
            Positive0 => is_finite_number(v) && sign_of(v) != Some(Sign::Minus),
            Positive => is_finite_number(v) && sign_of(v) == Some(Sign::Plus),
        })
    }

    fn boundary(&self) -> Vec<Value> {
        use NumericKind::*;
        let ints = |xs: &[i64]| xs.iter().map(|&x| Value::int(x)).collect::<Vec<_>>();
        let floats = |xs: &[f64]| xs.iter().map(|&x| Value::Float(x)).collect::<Vec<_>>();
        match self.kind {
            Numeric | ExtendedReal | Number => {
                let mut out = ints(&[0, 1, -1]);
                out.extend(floats(&[0.0, 0.5, -0.5, f64::EPSILON, f64::MAX, f64::MIN]));
                out.extend(floats(&[f64::INFINITY, f64::NEG_INFINITY, f64::NAN]));
                out
            }
            Integer => ints(&[0, 1, -1, i64::MAX, i64::MIN]),
            Natural0 => ints(&[0, 1, 2]),
            Natural1 => ints(&[1, 2]),
            Positive0 => {
                let mut out = ints(&[0, 1]);
                out.extend(floats(&[0.0, 5e-324, 0.5, 1.0, f64::MAX]));
                out
            }
            Positive => {
                let mut out = ints(&[1]);
                out.extend(floats(&[5e-324, 0.5, 1.0, f64::MAX]));
                out
            }
        }
    }

    fn sample(&self, rng: &mut dyn RngCore, _depth: u32) -> Option<Value> {
        use NumericKind::*;
        Some(match self.kind {
            Numeric | ExtendedReal | Number => {
                let special = rng.random_range(0..20);
                if self.kind != Number && special == 0 {
                    Value::Float(if rng.random() { f64::INFINITY } else { f64::NEG_INFINITY })
                } else if self.kind == Numeric && special == 1 {
                    Value::Float(f64::NAN)
                } else if rng.random_bool(0.3) {
                    Value::Int(random_int(rng))
                } else {
                    Value::Float(random_finite(rng))
                }
            }
            Integer => Value::Int(random_int(rng)),
            Natural0 => Value::Int(random_int(rng).magnitude().clone().into()),
            Natural1 => Value::Int(BigInt::from(random_int(rng).magnitude().clone()) + 1),
            Positive0 | Positive => {
                if rng.random_bool(0.2) {
                    Value::int(rng.random_range(0..=1000))
                } else {
                    Value::Float(libm::fabs(random_finite(rng)))
                }
            }
        })
    }
}

/// Number between two endpoints with configurable inclusivity.
#[derive(Debug, Clone)]
pub struct Range {
    lo: f64,
    hi: f64,
    lo_closed: bool,
    hi_closed: bool,
}

impl Range {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self, TypeError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(TypeError::BadRange { lo, hi });
        }
        Ok(Range {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    /// Inclusive on both ends.
    pub fn closed(lo: f64, hi: f64) -> Result<Self, TypeError> {
        Self::new(lo, hi, true, true)
    }

    pub fn closed_open(lo: f64, hi: f64) -> Result<Self, TypeError> {
        Self::new(lo, hi, true, false)
    }

    pub fn open_closed(lo: f64, hi: f64) -> Result<Self, TypeError> {
        Self::new(lo, hi, false, true)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self, TypeError> {
        Self::new(lo, hi, false, false)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn contains_f64(&self, x: f64) -> bool {
        self.check(&Value::Float(x)).unwrap_or(false)
    }
}

impl Refinement for Range {
    fn name(&self) -> String {
        let kind = match (self.lo_closed, self.hi_closed) {
            (true, true) => "Range",
            (true, false) => "RangeClosedOpen",
            (false, true) => "RangeOpenClosed",
            (false, false) => "RangeOpen",
        };
        format!("{kind}({}, {})", fmt_num(self.lo), fmt_num(self.hi))
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        if !v.is_numeric() {
            return Ok(false);
        }
        let lo = numeric_cmp(v, &Value::Float(self.lo));
        let hi = numeric_cmp(v, &Value::Float(self.hi));
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return Ok(false);
        };
        let above = lo.is_gt() || (self.lo_closed && lo.is_eq());
        let below = hi.is_lt() || (self.hi_closed && hi.is_eq());
        Ok(above && below)
    }

    fn boundary(&self) -> Vec<Value> {
        let mut out = Vec::new();
        let mut push = |x: f64| {
            if self.contains_f64(x) && !out.iter().any(|v: &Value| v.as_f64() == Some(x)) {
                out.push(Value::Float(x));
            }
        };
        push(self.lo);
        push(self.hi);
        push(0.0);
        if self.lo.is_finite() && self.hi.is_finite() {
            push(self.lo / 2.0 + self.hi / 2.0);
        }
        push(self.lo.next_up());
        push(self.hi.next_down());
        push(1.0);
        push(-1.0);
        out
    }

    fn sample(&self, rng: &mut dyn RngCore, _depth: u32) -> Option<Value> {
        let x = match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                if rng.random_range(0..10) == 0 {
                    if rng.random() {
                        self.lo
                    } else {
                        self.hi
                    }
                } else {
                    let u: f64 = rng.random();
                    self.lo + u * (self.hi - self.lo)
                }
            }
            (true, false) => self.lo + libm::fabs(random_finite(rng)),
            (false, true) => self.hi - libm::fabs(random_finite(rng)),
            (false, false) => random_finite(rng),
        };
        Some(Value::Float(x))
    }
}
