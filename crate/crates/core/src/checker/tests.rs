use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::types::{integer, list, natural0, number, positive};
use crate::value::Value;

fn cube() -> Contract {
    Contract::new()
        .accepts("t", number())
        .returns(number())
        .ensures("t >= t` --> return >= return`")
}

fn reg_fn(r: &Registry, name: &str, c: Contract, f: fn(f64) -> f64) -> ContractedFunction {
    r.register(name, c, move |a| Ok(Value::Float(f(a["t"].as_f64().unwrap()))))
        .unwrap()
}

#[test]
fn registration_rejects_bad_contracts() {
    let r = Registry::new();
    let body = |_: &mut Arguments| Ok(Value::None);
    let bad = [
        Contract::new().accepts("x", integer()).requires("y > 0"),
        Contract::new().accepts("x", integer()).requires("x` > 0"),
        Contract::new().accepts("x", integer()).requires("return > 0"),
        Contract::new().accepts("x", integer()).ensures("nope(x)"),
        Contract::new().accepts("x", integer()).ensures("x.dtype == 1"),
        Contract::new().accepts("x", integer()).accepts("x", integer()),
        Contract::new().accepts("return", integer()),
    ];
    for (i, c) in bad.into_iter().enumerate() {
        let err = r.register(alloc::format!("f{i}"), c, body).unwrap_err();
        assert!(matches!(err, ContractError::Malformed { .. }), "{i}: {err}");
    }
    let err = r
        .register("g", Contract::new().accepts("x", integer()).ensures("x <"), body)
        .unwrap_err();
    assert!(matches!(err, ContractError::Parse { .. }));
    r.register("h", Contract::new(), body).unwrap();
    assert_eq!(
        r.register("h", Contract::new(), body).unwrap_err(),
        ContractError::Duplicate("h".into())
    );
}

#[test]
fn argument_and_return_types() {
    let f = ContractedFunction::new(
        "dec",
        Contract::new().accepts("x", integer()).returns(positive()),
        |a| Ok(Value::Int(a["x"].as_int().unwrap() - 1)),
    )
    .unwrap();
    assert!(f.call_positional(vec![Value::int(5)]).is_ok());
    let e = f.call_positional(vec![Value::Float(1.5)]).unwrap_err();
    let v = e.violation().unwrap();
    assert_eq!(v.kind, ViolationKind::ArgumentType);
    assert_eq!(v.argument.as_deref(), Some("x"));
    let e = f.call_positional(vec![Value::int(1)]).unwrap_err();
    assert_eq!(e.violation().unwrap().kind, ViolationKind::ReturnType);
}

#[test]
fn element_offender_is_named() {
    let f = ContractedFunction::new("s", Contract::new().accepts("xs", list(natural0())), |_| {
        Ok(Value::None)
    })
    .unwrap();
    let xs = Value::Seq(vec![Value::int(1), Value::int(-2)]);
    let e = f.call(Arguments::new().with("xs", xs)).unwrap_err();
    let off = e.violation().unwrap().offender.clone().unwrap();
    assert!(off.contains("[1]") && off.contains("-2"), "{off}");
}

#[test]
fn bad_arguments() {
    let f = ContractedFunction::new("f", Contract::new().accepts("x", integer()), |_| Ok(Value::None)).unwrap();
    assert!(matches!(f.call(Arguments::new()), Err(CallError::BadArguments(_))));
    let a = Arguments::new().with("x", 1i64).with("y", 2i64);
    assert!(matches!(f.call(a), Err(CallError::BadArguments(_))));
    assert!(matches!(
        f.call_positional(vec![Value::int(1), Value::int(2)]),
        Err(CallError::BadArguments(_))
    ));
}

#[test]
fn rest_arguments_checked_elementwise() {
    let f = ContractedFunction::new(
        "sum",
        Contract::new().rest_positional("xs", integer()).returns(integer()),
        |a| {
            let xs = a["xs"].as_items().unwrap();
            Ok(Value::Int(xs.iter().map(|x| x.as_int().unwrap().clone()).sum()))
        },
    )
    .unwrap();
    assert!(f.call_positional(vec![]).is_ok());
    assert!(f.call_positional(vec![Value::int(1), Value::int(2)]).is_ok());
    let e = f.call_positional(vec![Value::int(1), Value::Float(0.5)]).unwrap_err();
    assert_eq!(e.violation().unwrap().argument.as_deref(), Some("xs[1]"));
}

#[test]
fn conditions() {
    let f = ContractedFunction::new(
        "half",
        Contract::new()
            .accepts("x", integer())
            .requires("x % 2 == 0")
            .ensures("return * 2 == x"),
        |a| Ok(Value::Int(a["x"].as_int().unwrap() / 2)),
    )
    .unwrap();
    assert!(f.call_positional(vec![Value::int(8)]).is_ok());
    let e = f.call_positional(vec![Value::int(7)]).unwrap_err();
    let v = e.violation().unwrap();
    assert_eq!(v.kind, ViolationKind::EntryCondition);
    assert_eq!(v.detail, "x % 2 == 0");
    assert!(!f.requires_hold(&Arguments::new().with("x", 3i64)).unwrap());
    assert!(f.requires_hold(&Arguments::new().with("x", 4i64)).unwrap());
}

#[test]
fn eval_errors_are_classified() {
    let f = ContractedFunction::new(
        "f",
        Contract::new().accepts_untyped("xs").ensures("xs[3] == 0").ensures("return"),
        |_| Ok(Value::int(1)),
    )
    .unwrap();
    let e = f.call(Arguments::new().with("xs", Value::Seq(vec![]))).unwrap_err();
    let v = e.violation().unwrap();
    assert_eq!(v.kind, ViolationKind::ExitCondition);
    assert!(v.message.is_some());
    let e = f
        .call(Arguments::new().with("xs", Value::Seq(vec![Value::int(0); 4])))
        .unwrap_err();
    assert_eq!(e.violation().unwrap().kind, ViolationKind::ContractMalformed);
}

#[test]
fn exit_conditions_see_entry_values() {
    let f = ContractedFunction::new(
        "push",
        Contract::new()
            .accepts("xs", list(integer()))
            .returns(integer())
            .ensures("return == len(xs) + 1"),
        |a| {
            let xs = a.get_mut("xs").unwrap().as_items_mut().unwrap();
            xs.push(Value::int(0));
            Ok(Value::int(xs.len() as i64))
        },
    )
    .unwrap();
    let xs = Value::Seq(vec![Value::int(1), Value::int(2)]);
    assert_eq!(f.call(Arguments::new().with("xs", xs)).unwrap(), Value::int(3));
}

#[test]
fn cube_passes_square_fails() {
    let r = Registry::new();
    let c = reg_fn(&r, "cube", cube(), |t| t * t * t);
    for i in -50..50 {
        c.call_positional(vec![Value::Float(i as f64 * 0.37)]).unwrap();
    }
    assert_eq!(c.history_len(), DEFAULT_RESERVOIR_CAPACITY);
    assert_eq!(c.history_seen(), 100);

    let s = reg_fn(&r, "square", cube(), |t| t * t);
    s.call_positional(vec![Value::Float(-2.0)]).unwrap();
    let e = s.call_positional(vec![Value::Float(-1.0)]).unwrap_err();
    let v = e.violation().unwrap();
    assert!(v.hyperproperty);
    assert_eq!(v.kind, ViolationKind::ExitCondition);
    assert_eq!(v.past_seq_nos(), vec![0]);
    assert_eq!(v.witness.len(), 2);
    assert!(v.to_string().contains("past call #0"));
}

#[test]
fn failed_calls_are_not_recorded() {
    let r = Registry::new();
    let s = reg_fn(&r, "square", cube(), |t| t * t);
    s.call_positional(vec![Value::Float(-2.0)]).unwrap();
    assert!(s.call_positional(vec![Value::Float(-1.0)]).is_err());
    assert_eq!(s.history_seq_nos(), vec![0]);
}

#[test]
fn empty_reservoir_is_vacuous() {
    let r = Registry::new();
    let s = reg_fn(&r, "square", cube().reservoir_capacity(0), |t| t * t);
    for i in -20..20 {
        s.call_positional(vec![Value::Float(i as f64)]).unwrap();
    }
    assert_eq!(s.history_len(), 0);
}

#[test]
fn depth_two_uses_distinct_records() {
    let f = ContractedFunction::new(
        "id",
        Contract::new()
            .accepts("x", integer())
            .ensures("x != x` and x` != x`` --> x != x``"),
        |a| Ok(a["x"].clone()),
    )
    .unwrap();
    // Not transitive once we see 1, 2, 1: the current call is 1, past 2 and 1.
    f.call_positional(vec![Value::int(1)]).unwrap();
    f.call_positional(vec![Value::int(2)]).unwrap();
    let e = f.call_positional(vec![Value::int(1)]).unwrap_err();
    let mut past = e.violation().unwrap().past_seq_nos();
    past.sort_unstable();
    assert_eq!(past, vec![0, 1]);
}

#[test]
fn switches() {
    let r = Registry::new();
    let s = reg_fn(&r, "square", cube(), |t| t * t);
    r.set_checking(Scope::Global, false).unwrap();
    assert!(!s.checking_enabled());
    s.call_positional(vec![Value::Float(-2.0)]).unwrap();
    s.call_positional(vec![Value::Float(-1.0)]).unwrap();
    assert_eq!(s.history_seen(), 0);
    r.set_checking(Scope::Function("square".into()), true).unwrap();
    assert!(s.checking_enabled());
    r.set_checking(Scope::Global, false).unwrap();
    assert!(!s.checking_enabled());
    assert_eq!(
        r.set_checking(Scope::Function("nope".into()), true),
        Err(RegistryError::UnknownFunction("nope".into()))
    );
    r.set_checking(Scope::Global, true).unwrap();
    assert!(s.checking_enabled());
}

#[test]
fn disabled_is_transparent() {
    let r = Registry::new();
    let f = reg_fn(&r, "cube", cube(), |t| t * t * t);
    for i in 0..50 {
        let x = Value::Float(i as f64 - 25.5);
        r.set_checking(Scope::Global, true).unwrap();
        let on = f.fresh().call_positional(vec![x.clone()]).unwrap();
        r.set_checking(Scope::Global, false).unwrap();
        let off = f.call_positional(vec![x.clone()]).unwrap();
        let bare = f.call_bare(&mut Arguments::new().with("t", x)).unwrap();
        assert_eq!(on, off);
        assert_eq!(off, bare);
    }
}

#[test]
fn host_errors_pass_through() {
    let f = ContractedFunction::new("boom", Contract::new(), |_| Err("kaput".into())).unwrap();
    match f.call(Arguments::new()) {
        Err(CallError::Host(e)) => assert_eq!(e.to_string(), "kaput"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn fresh_resets_history() {
    let f = ContractedFunction::new("c", cube(), |a| Ok(a["t"].clone())).unwrap();
    for i in 0..5 {
        f.call_positional(vec![Value::int(i)]).unwrap();
    }
    let g = f.fresh();
    assert_eq!(g.history_seen(), 0);
    assert_eq!(f.history_seen(), 5);
    let names: Vec<String> = f.contract().param_names().map(|s| s.to_string()).collect();
    assert_eq!(names, vec!["t"]);
}
