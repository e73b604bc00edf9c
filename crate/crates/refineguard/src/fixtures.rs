//! Built-in contracted functions: the motivating examples, seeded
//! bugs, and their corrected versions, grouped into named suites.

use refineguard_core::checker::{Arguments, Contract, ContractError, HostError, Registry};
use refineguard_core::types::*;
use refineguard_core::{NdArray, Value};

use crate::bench::Workload;

pub type Body = fn(&mut Arguments) -> Result<Value, HostError>;

/// A registration routine plus the benchmark workloads it supports.
#[derive(Clone, Copy)]
pub struct Suite {
    pub name: &'static str,
    pub description: &'static str,
    register: fn(&Registry) -> Result<(), ContractError>,
    workloads: fn() -> Vec<Workload>,
}

impl Suite {
    pub fn register(&self, r: &Registry) -> Result<(), ContractError> {
        (self.register)(r)
    }

    pub fn workloads(&self) -> Vec<Workload> {
        (self.workloads)()
    }

    /// A new registry holding this suite.
    pub fn registry(&self) -> Result<Registry, ContractError> {
        let r = Registry::new();
        self.register(&r)?;
        Ok(r)
    }
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "examples",
        description: "complement, Fisher transform, monotonicity and mutation examples",
        register: register_examples,
        workloads: example_workloads,
    },
    Suite {
        name: "seeded-bugs",
        description: "three planted bugs the autotester must find",
        register: register_seeded_bugs,
        workloads: Vec::new,
    },
    Suite {
        name: "fixtures",
        description: "the examples together with the planted bugs",
        register: register_fixtures,
        workloads: example_workloads,
    },
    Suite {
        name: "fixtures-fixed",
        description: "every fixture with its bug removed",
        register: register_fixed,
        workloads: example_workloads,
    },
];

pub fn suite(name: &str) -> Option<Suite> {
    SUITES.iter().copied().find(|s| s.name == name)
}

fn host(msg: impl Into<String>) -> HostError {
    msg.into().into()
}

fn f64_arg(a: &Arguments, name: &str) -> Result<f64, HostError> {
    a.get(name)
        .and_then(Value::as_f64)
        .ok_or_else(|| host(format!("`{name}` is not a number")))
}

fn floats_arg(a: &Arguments, name: &str) -> Result<Vec<f64>, HostError> {
    let items = a
        .get(name)
        .and_then(Value::as_items)
        .ok_or_else(|| host(format!("`{name}` is not a list")))?;
    items
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| host(format!("`{name}` holds a non-number"))))
        .collect()
}

fn float_list(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Seq(xs.into_iter().map(Value::Float).collect())
}

pub const COMPLEMENT_ENSURES: &str = "all(seq[i] != return[::-1][i] for i in range(0, len(seq)))";
pub const MONOTONIC: &str = "t >= t` --> return >= return`";
pub const SAME_SHAPE: &str = "return.shape == corr_values.shape";

pub fn complement_contract() -> Contract {
    Contract::new()
        .accepts("seq", list(set_chars("AGCT")))
        .returns(list(set_chars("AGCT")))
        .ensures(COMPLEMENT_ENSURES)
}

/// Reverse complement. Letters outside the DNA alphabet pass through.
pub fn complement_sequence(a: &mut Arguments) -> Result<Value, HostError> {
    let items = a
        .get("seq")
        .and_then(Value::as_items)
        .ok_or_else(|| host("`seq` is not a list"))?;
    let out = items
        .iter()
        .rev()
        .map(|c| {
            let c = c.as_text().unwrap_or("");
            Value::text(match c {
                "A" => "T",
                "T" => "A",
                "C" => "G",
                "G" => "C",
                other => other,
            })
        })
        .collect();
    Ok(Value::Seq(out))
}

pub fn fisher_contract() -> Contract {
    Contract::new()
        .accepts("corr_values", ndarray().elements(range(-1.0, 1.0)))
        .returns(ndarray().elements(number()))
        .ensures(SAME_SHAPE)
}

/// The same transform with the entry check dropped: only the return type
/// stands between a bad input and a NaN result.
pub fn fisher_unguarded_contract() -> Contract {
    Contract::new()
        .accepts("corr_values", ndarray())
        .returns(ndarray().elements(number()))
        .ensures(SAME_SHAPE)
}

pub fn fisher_transform(a: &mut Arguments) -> Result<Value, HostError> {
    let arr = a
        .get("corr_values")
        .and_then(Value::as_array)
        .ok_or_else(|| host("`corr_values` is not an array"))?;
    Ok(Value::NdArray(arr.map(f64::atanh)))
}

pub fn monotonic_contract() -> Contract {
    Contract::new().accepts("t", number()).returns(number()).ensures(MONOTONIC)
}

pub fn cube(a: &mut Arguments) -> Result<Value, HostError> {
    let t = f64_arg(a, "t")?;
    Ok(Value::Float(t * t * t))
}

pub fn square(a: &mut Arguments) -> Result<Value, HostError> {
    let t = f64_arg(a, "t")?;
    Ok(Value::Float(t * t))
}

pub fn sqrt_checked(a: &mut Arguments) -> Result<Value, HostError> {
    Ok(Value::Float(f64_arg(a, "x")?.sqrt()))
}

pub fn drain_total_contract() -> Contract {
    Contract::new()
        .accepts("xs", list(range(-1000.0, 1000.0)))
        .returns(number())
        .ensures("return == sum(xs)")
}

/// Empties its argument while summing it.
pub fn drain_total(a: &mut Arguments) -> Result<Value, HostError> {
    let items = a
        .get_mut("xs")
        .and_then(Value::as_items_mut)
        .ok_or_else(|| host("`xs` is not a list"))?;
    let mut total = 0.0;
    for v in items.drain(..) {
        total += v.as_f64().unwrap_or(f64::NAN);
    }
    Ok(Value::Float(total))
}

pub fn describe(a: &mut Arguments) -> Result<Value, HostError> {
    Ok(Value::text(a.get("obj").map(Value::render).unwrap_or_default()))
}

pub fn decrement_contract() -> Contract {
    Contract::new().accepts("x", number()).returns(positive())
}

pub fn decrement(a: &mut Arguments) -> Result<Value, HostError> {
    Ok(Value::Float(f64_arg(a, "x")? - 1.0))
}

pub fn discretize_contract() -> Contract {
    Contract::new()
        .accepts("mass", list(positive0()))
        .returns(list(range(0.0, 1.0)))
        .requires("len(mass) > 0 and sum(mass) > 0")
        .ensures("abs(sum(return) - 1) < 1e-9")
}

/// Normalizes to a distribution, then rounds each bin to two decimals.
pub fn discretize(a: &mut Arguments) -> Result<Value, HostError> {
    let m = floats_arg(a, "mass")?;
    let total: f64 = m.iter().sum();
    Ok(float_list(m.iter().map(|x| (x / total * 100.0).round() / 100.0)))
}

pub fn discretize_fixed(a: &mut Arguments) -> Result<Value, HostError> {
    let m = floats_arg(a, "mass")?;
    let top = m.iter().copied().fold(0.0, f64::max);
    let scaled: Vec<f64> = m.iter().map(|x| x / top).collect();
    let total: f64 = scaled.iter().sum();
    Ok(float_list(scaled.iter().map(|x| x / total)))
}

pub fn advect_contract() -> Contract {
    Contract::new()
        .accepts("pdf", list(range(0.0, 1.0)))
        .accepts("courant", range(0.0, 1.0))
        .returns(list(positive0()))
        .ensures("len(return) == len(pdf)")
}

fn neighbors(p: &[f64], i: usize) -> (f64, f64) {
    let left = if i == 0 { 0.0 } else { p[i - 1] };
    let right = p.get(i + 1).copied().unwrap_or(0.0);
    (left, right)
}

/// One advection step with a centered difference, which can push mass
/// below zero next to a sharp edge.
pub fn advect(a: &mut Arguments) -> Result<Value, HostError> {
    let p = floats_arg(a, "pdf")?;
    let c = f64_arg(a, "courant")?;
    Ok(float_list((0..p.len()).map(|i| {
        let (l, r) = neighbors(&p, i);
        p[i] - c / 2.0 * (r - l)
    })))
}

/// Upwind step: a convex combination of neighbors, so never negative.
pub fn advect_fixed(a: &mut Arguments) -> Result<Value, HostError> {
    let p = floats_arg(a, "pdf")?;
    let c = f64_arg(a, "courant")?;
    Ok(float_list((0..p.len()).map(|i| {
        let (l, _) = neighbors(&p, i);
        (1.0 - c) * p[i] + c * l
    })))
}

fn register_examples(r: &Registry) -> Result<(), ContractError> {
    r.register("complement_sequence", complement_contract(), complement_sequence)?;
    r.register("fisher_transform", fisher_contract(), fisher_transform)?;
    r.register("cube", monotonic_contract(), cube)?;
    r.register("square", monotonic_contract(), square)?;
    r.register(
        "sqrt_checked",
        Contract::new().accepts("x", positive0()).returns(positive0()),
        sqrt_checked,
    )?;
    r.register("drain_total", drain_total_contract(), drain_total)?;
    r.register("describe", Contract::new().accepts("obj", unchecked()).returns(string()), describe)?;
    Ok(())
}

fn register_seeded_bugs(r: &Registry) -> Result<(), ContractError> {
    r.register("decrement", decrement_contract(), decrement)?;
    r.register("discretize", discretize_contract(), discretize)?;
    r.register("advect", advect_contract(), advect)?;
    Ok(())
}

fn register_fixtures(r: &Registry) -> Result<(), ContractError> {
    register_examples(r)?;
    register_seeded_bugs(r)
}

fn register_fixed(r: &Registry) -> Result<(), ContractError> {
    r.register("complement_sequence", complement_contract(), complement_sequence)?;
    r.register(
        "fisher_transform",
        Contract::new()
            .accepts("corr_values", ndarray().elements(range_open(-1.0, 1.0)))
            .returns(ndarray().elements(number()))
            .ensures(SAME_SHAPE),
        fisher_transform,
    )?;
    r.register(
        "cube",
        Contract::new()
            .accepts("t", range(-1e100, 1e100))
            .returns(number())
            .ensures(MONOTONIC),
        cube,
    )?;
    r.register(
        "sqrt_checked",
        Contract::new().accepts("x", positive0()).returns(positive0()),
        sqrt_checked,
    )?;
    r.register("drain_total", drain_total_contract(), drain_total)?;
    r.register("describe", Contract::new().accepts("obj", unchecked()).returns(string()), describe)?;
    r.register("decrement", decrement_contract().requires("x > 1"), decrement)?;
    r.register("discretize", discretize_contract(), discretize_fixed)?;
    r.register("advect", advect_contract(), advect_fixed)?;
    Ok(())
}

/// Off-diagonal correlations of a small data set, all strictly inside
/// (-1, 1) so a single transform is legal.
pub fn sample_correlations() -> NdArray {
    NdArray::new(vec![2, 3], vec![0.21, -0.48, 0.87, 0.95, -0.33, 0.62]).expect("shape matches data")
}

fn example_workloads() -> Vec<Workload> {
    vec![
        Workload::new("fisher", "fisher_transform", 100_000, |i| {
            let data: Vec<f64> = (0..16).map(|k| (((i + k) % 19) as f64 - 9.0) / 10.0).collect();
            Arguments::new().with("corr_values", NdArray::from_vec(data))
        }),
        Workload::new("complement", "complement_sequence", 20_000, |i| {
            let seq: String = (0..12).map(|k| ['A', 'G', 'C', 'T'][(i * 7 + k) % 4]).collect();
            Arguments::new().with("seq", Value::chars(&seq))
        }),
        Workload::new("cube", "cube", 20_000, |i| Arguments::new().with("t", i as f64 * 0.01)),
    ]
}
