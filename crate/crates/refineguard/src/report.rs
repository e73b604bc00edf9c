//! Serialized form of test and benchmark reports (`schema: 1`).

use std::fmt::Write as _;

use num_bigint::BigInt;
use refineguard_core::checker::{Arguments, ViolationReport};
use refineguard_core::{Map, NdArray, Value};
use serde::{Deserialize, Serialize};

use crate::autotest::{Outcome, TestPlan, TestReport, Totals};
use crate::bench::BenchResult;

pub const SCHEMA_VERSION: u32 = 1;

/// JSON-safe encoding of a [`Value`]. Floats that JSON cannot hold are
/// written as the strings `"nan"`, `"inf"` and `"-inf"`; integers are
/// decimal strings so that no precision is lost.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JsonValue {
    None,
    Bool(bool),
    Int(String),
    Float(JsonFloat),
    Text(String),
    Seq(Vec<JsonValue>),
    Tuple(Vec<JsonValue>),
    Map(Vec<(JsonValue, JsonValue)>),
    Array { shape: Vec<usize>, data: Vec<JsonFloat> },
    /// Host objects are recorded by their nominal type only.
    Handle(String),
}

impl PartialEq for JsonValue {
    fn eq(&self, other: &Self) -> bool {
        use JsonValue::*;
        match (self, other) {
            (None, None) => true,
            (Bool(a), Bool(b)) => a == b,
            (Int(a), Int(b)) | (Text(a), Text(b)) | (Handle(a), Handle(b)) => a == b,
            (Float(a), Float(b)) => a == b,
            (Seq(a), Seq(b)) | (Tuple(a), Tuple(b)) => a == b,
            (Map(a), Map(b)) => a == b,
            (Array { shape: s, data: d }, Array { shape: t, data: e }) => s == t && d == e,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonFloat {
    Finite(f64),
    Special(Special),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Special {
    #[serde(rename = "nan")]
    Nan,
    #[serde(rename = "inf")]
    Inf,
    #[serde(rename = "-inf")]
    NegInf,
}

impl JsonFloat {
    pub fn new(x: f64) -> Self {
        if x.is_nan() {
            JsonFloat::Special(Special::Nan)
        } else if x == f64::INFINITY {
            JsonFloat::Special(Special::Inf)
        } else if x == f64::NEG_INFINITY {
            JsonFloat::Special(Special::NegInf)
        } else {
            JsonFloat::Finite(x)
        }
    }

    pub fn get(self) -> f64 {
        match self {
            JsonFloat::Finite(x) => x,
            JsonFloat::Special(Special::Nan) => f64::NAN,
            JsonFloat::Special(Special::Inf) => f64::INFINITY,
            JsonFloat::Special(Special::NegInf) => f64::NEG_INFINITY,
        }
    }
}

/// Bitwise for finite values, so that a round trip must be exact.
impl PartialEq for JsonFloat {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (JsonFloat::Finite(a), JsonFloat::Finite(b)) => a.to_bits() == b.to_bits(),
            (JsonFloat::Special(a), JsonFloat::Special(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("bad integer literal `{0}`")]
    Int(String),
    #[error("host objects cannot be rebuilt from a report (type `{0}`)")]
    Handle(String),
    #[error(transparent)]
    Value(#[from] refineguard_core::ValueError),
}

impl JsonValue {
    pub fn encode(v: &Value) -> JsonValue {
        match v {
            Value::None => JsonValue::None,
            Value::Bool(b) => JsonValue::Bool(*b),
            Value::Int(i) => JsonValue::Int(i.to_string()),
            Value::Float(x) => JsonValue::Float(JsonFloat::new(*x)),
            Value::Text(s) => JsonValue::Text(s.clone()),
            Value::Seq(items) => JsonValue::Seq(items.iter().map(JsonValue::encode).collect()),
            Value::Tuple(items) => JsonValue::Tuple(items.iter().map(JsonValue::encode).collect()),
            Value::Map(m) => JsonValue::Map(m.iter().map(|(k, v)| (JsonValue::encode(k), JsonValue::encode(v))).collect()),
            Value::NdArray(a) => JsonValue::Array {
                shape: a.shape().to_vec(),
                data: a.data().iter().copied().map(JsonFloat::new).collect(),
            },
            Value::Handle(h) => JsonValue::Handle(h.type_name().to_string()),
        }
    }

    pub fn decode(&self) -> Result<Value, DecodeError> {
        let all = |xs: &[JsonValue]| xs.iter().map(JsonValue::decode).collect::<Result<Vec<_>, _>>();
        Ok(match self {
            JsonValue::None => Value::None,
            JsonValue::Bool(b) => Value::Bool(*b),
            JsonValue::Int(s) => Value::Int(s.parse::<BigInt>().map_err(|_| DecodeError::Int(s.clone()))?),
            JsonValue::Float(x) => Value::Float(x.get()),
            JsonValue::Text(s) => Value::Text(s.clone()),
            JsonValue::Seq(xs) => Value::Seq(all(xs)?),
            JsonValue::Tuple(xs) => Value::Tuple(all(xs)?),
            JsonValue::Map(kv) => {
                let entries = kv
                    .iter()
                    .map(|(k, v)| Ok((k.decode()?, v.decode()?)))
                    .collect::<Result<Vec<_>, DecodeError>>()?;
                Value::Map(Map::from_entries(entries)?)
            }
            JsonValue::Array { shape, data } => {
                Value::NdArray(NdArray::new(shape.clone(), data.iter().map(|x| x.get()).collect())?)
            }
            JsonValue::Handle(t) => return Err(DecodeError::Handle(t.clone())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonArg {
    pub name: String,
    pub value: JsonValue,
    /// Human-readable rendering of `value`.
    pub rendered: String,
}

pub fn encode_args(a: &Arguments) -> Vec<JsonArg> {
    a.iter()
        .map(|(n, v)| JsonArg {
            name: n.to_string(),
            value: JsonValue::encode(v),
            rendered: v.render(),
        })
        .collect()
}

pub fn decode_args(a: &[JsonArg]) -> Result<Arguments, DecodeError> {
    a.iter().map(|x| Ok((x.name.clone(), x.value.decode()?))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionEntry {
    pub name: String,
    /// `passed`, `failed`, `untestable` or `timed_out`.
    pub outcome: String,
    pub cases: usize,
    pub draws: usize,
    pub reservoir_capacity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Reproducing arguments of a failure, after shrinking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub args: Option<Vec<JsonArg>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_args: Option<Vec<JsonArg>>,
    /// Earlier calls a hyperproperty failure depends on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<Vec<JsonArg>>,
    #[serde(default)]
    pub hyperproperty: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub untestable_reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killed: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTotals {
    pub passed: usize,
    pub failed: usize,
    pub untestable: usize,
    pub timed_out: usize,
}

impl From<Totals> for JsonTotals {
    fn from(t: Totals) -> Self {
        JsonTotals {
            passed: t.passed,
            failed: t.failed,
            untestable: t.untestable,
            timed_out: t.timed_out,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub checks_enabled: bool,
    pub plan: TestPlan,
    pub functions: Vec<FunctionEntry>,
    pub totals: JsonTotals,
}

impl JsonReport {
    pub fn new(suite: &str, report: &TestReport, checks_enabled: bool) -> Self {
        let functions = report
            .functions
            .iter()
            .map(|f| {
                let mut e = FunctionEntry {
                    name: f.name.clone(),
                    outcome: f.outcome.code().into(),
                    cases: f.cases,
                    draws: f.draws,
                    reservoir_capacity: f.reservoir_capacity,
                    violation: None,
                    error: None,
                    args: None,
                    original_args: None,
                    history: Vec::new(),
                    hyperproperty: false,
                    untestable_reason: None,
                    killed: None,
                };
                match &f.outcome {
                    Outcome::Failed(fail) => {
                        e.violation = fail.violation.clone();
                        e.error = Some(fail.error.clone());
                        e.args = Some(encode_args(&fail.args));
                        e.original_args = Some(encode_args(&fail.original_args));
                        e.history = fail.history.iter().map(encode_args).collect();
                        e.hyperproperty = fail.hyperproperty();
                    }
                    Outcome::Untestable(u) => e.untestable_reason = Some(u.code().into()),
                    Outcome::TimedOut { killed, .. } => e.killed = Some(*killed),
                    Outcome::Passed { .. } => {}
                }
                e
            })
            .collect();
        JsonReport {
            schema: SCHEMA_VERSION,
            suite: suite.into(),
            seed: report.plan.seed,
            checks_enabled,
            plan: report.plan.clone(),
            functions,
            totals: report.totals().into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonBench {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub results: Vec<BenchResult>,
}

pub fn text_report(suite: &str, report: &TestReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "suite {suite}, seed {}", report.plan.seed);
    for f in &report.functions {
        let _ = match &f.outcome {
            Outcome::Passed { cases } => writeln!(out, "  PASS       {} ({cases} cases)", f.name),
            Outcome::Failed(fail) => {
                let args: Vec<String> = fail.args.iter().map(|(n, v)| format!("{n}={}", v.render())).collect();
                let _ = writeln!(out, "  FAIL       {} at case {} with {}", f.name, fail.case, args.join(", "));
                for line in fail.error.lines() {
                    let _ = writeln!(out, "             {line}");
                }
                Ok(())
            }
            Outcome::Untestable(u) => writeln!(out, "  UNTESTABLE {} ({})", f.name, u.code()),
            Outcome::TimedOut { killed, completed } => {
                writeln!(out, "  TIMEOUT    {} ({killed} killed, {completed} completed)", f.name)
            }
        };
    }
    let t = report.totals();
    let _ = writeln!(
        out,
        "{} passed, {} failed, {} untestable, {} timed out",
        t.passed, t.failed, t.untestable, t.timed_out
    );
    let untestable: Vec<&str> = report.untestable().map(|(n, _)| n).collect();
    if !untestable.is_empty() {
        let _ = writeln!(out, "not tested: {}", untestable.join(", "));
    }
    out
}

pub fn text_bench(results: &[BenchResult]) -> String {
    let mut out = String::new();
    for r in results {
        let _ = writeln!(
            out,
            "{:<12} {} calls x {} runs: checked {:.4}s ± {:.4}, unchecked {:.4}s ± {:.4}, bare {:.4}s ± {:.4}; slowdown {:.2}x, wrapper overhead {:.3}x{}",
            r.workload,
            r.calls,
            r.runs,
            r.checked.mean,
            r.checked.sem,
            r.unchecked.mean,
            r.unchecked.sem,
            r.bare.mean,
            r.bare.sem,
            r.slowdown,
            r.disabled_overhead,
            if r.checks_disabled { " (checks disabled)" } else { "" },
        );
    }
    out
}
