use proptest::prelude::*;
use refineguard::autotest::{run_autotests, TestPlan};
use refineguard::bench::run_workload;
use refineguard::core::checker::Scope;
use refineguard::core::{value_eq, Map, NdArray, Value};
use refineguard::fixtures;
use refineguard::report::{decode_args, text_report, JsonReport, JsonValue};

#[test]
fn report_survives_serialization() {
    let r = fixtures::suite("fixtures").unwrap().registry().unwrap();
    let report = run_autotests(&r, &TestPlan::default()).unwrap();
    let doc = JsonReport::new("fixtures", &report, true);
    let back = JsonReport::from_json(&doc.to_json()).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.to_json(), doc.to_json());
    assert_eq!(back.totals.failed, report.totals().failed);
    assert!(text_report("fixtures", &report).contains("  FAIL "));
}

#[test]
fn reported_args_reproduce_the_failure() {
    let r = fixtures::suite("fixtures").unwrap().registry().unwrap();
    let doc = JsonReport::from_json(&JsonReport::new("fixtures", &run_autotests(&r, &TestPlan::default()).unwrap(), true).to_json())
        .unwrap();
    let mut replayed = 0;
    for e in doc.functions.iter().filter(|e| e.outcome == "failed") {
        let f = r.get(&e.name).unwrap().fresh_seeded(doc.seed);
        for past in &e.history {
            f.call(decode_args(past).unwrap()).unwrap();
        }
        let args = decode_args(e.args.as_ref().unwrap()).unwrap();
        let err = f.call(args).expect_err(&e.name);
        assert_eq!(err.violation().cloned().map(|v| v.kind), e.violation.as_ref().map(|v| v.kind), "{}", e.name);
        replayed += 1;
    }
    assert!(replayed >= 6, "{replayed}");
}

#[test]
fn special_floats_are_preserved() {
    for x in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY, -0.0, 1e-310, f64::MAX] {
        let v = Value::NdArray(NdArray::from_vec(vec![x]));
        let json = serde_json::to_string(&JsonValue::encode(&v)).unwrap();
        let back: JsonValue = serde_json::from_str(&json).unwrap();
        let got = back.decode().unwrap();
        assert_eq!(got.as_array().unwrap().data()[0].to_bits(), x.to_bits(), "{json}");
    }
}

#[test]
fn disabled_bench_arms_match() {
    let suite = fixtures::suite("examples").unwrap();
    let r = suite.registry().unwrap();
    r.set_checking(Scope::Global, false).unwrap();
    let w = suite.workloads().into_iter().find(|w| w.name == "cube").unwrap().with_calls(20_000);
    let res = run_workload(&r, &w, 5, 3, false).unwrap();
    assert!(res.checks_disabled);
    assert!((0.5..2.0).contains(&res.slowdown), "{}", res.slowdown);
}

fn leaf() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::None),
        any::<bool>().prop_map(Value::Bool),
        any::<i64>().prop_map(Value::int),
        any::<u64>().prop_map(|b| Value::Float(f64::from_bits(b))),
        "\\PC{0,8}".prop_map(Value::text),
        prop::collection::vec(any::<f64>(), 0..6).prop_map(|d| Value::NdArray(NdArray::from_vec(d))),
    ]
}

fn value() -> impl Strategy<Value = Value> {
    leaf().prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Seq),
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Tuple),
            prop::collection::vec((any::<i16>(), inner), 0..4).prop_map(|kv| {
                let entries = kv.into_iter().map(|(k, v)| (Value::int(k.into()), v));
                Value::Map(Map::from_entries(entries).unwrap())
            }),
        ]
    })
}

proptest! {
    #[test]
    fn json_values_round_trip(v in value()) {
        let json = serde_json::to_string(&JsonValue::encode(&v)).unwrap();
        let back: JsonValue = serde_json::from_str(&json).unwrap();
        let got = back.decode().unwrap();
        prop_assert!(value_eq(&got, &v), "{} vs {}", got.render(), v.render());
        prop_assert_eq!(JsonValue::encode(&got), back);
    }
}
