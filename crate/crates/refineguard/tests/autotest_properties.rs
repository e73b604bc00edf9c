use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use refineguard::autotest::{replay, run_autotests, test_function, Outcome, TestPlan, Untestable};
use refineguard::core::checker::{Arguments, Contract, ContractedFunction, HostError, Registry};
use refineguard::core::types::*;
use refineguard::core::Value;
use refineguard::fixtures;
use refineguard::report::JsonReport;

fn plan(max_cases: usize) -> TestPlan {
    TestPlan {
        max_cases,
        ..TestPlan::default()
    }
}

fn json(suite: &str, p: &TestPlan) -> String {
    let r = fixtures::suite(suite).unwrap().registry().unwrap();
    JsonReport::new(suite, &run_autotests(&r, p).unwrap(), true).to_json()
}

#[test]
fn same_seed_same_report() {
    let p = plan(60);
    assert_eq!(json("fixtures", &p), json("fixtures", &p));
    let parallel = TestPlan { jobs: 4, ..p.clone() };
    assert_eq!(json("fixtures", &p), json("fixtures", &parallel).replace("\"jobs\": 4", "\"jobs\": 1"));
}

#[test]
fn other_seeds_still_find_the_seeded_bugs() {
    for seed in [1, 2, 3, 99] {
        let r = fixtures::suite("seeded-bugs").unwrap().registry().unwrap();
        let report = run_autotests(&r, &TestPlan { seed, ..TestPlan::default() }).unwrap();
        for f in &report.functions {
            assert!(matches!(f.outcome, Outcome::Failed(_)), "seed {seed}: {} {}", f.name, f.outcome.code());
        }
    }
}

#[test]
fn passing_functions_run_exactly_max_cases() {
    let r = fixtures::suite("fixtures-fixed").unwrap().registry().unwrap();
    let report = run_autotests(&r, &plan(37)).unwrap();
    for f in &report.functions {
        match f.outcome {
            Outcome::Passed { cases } => {
                assert_eq!(cases, f.cases);
                assert!(f.draws >= cases, "{}", f.name);
                // Types with a finite member set may run out before the cap.
                assert!(cases <= 37);
            }
            Outcome::Untestable(_) => {}
            ref o => panic!("{}: {}", f.name, o.code()),
        }
    }
    assert_eq!(report.get("cube").unwrap().cases, 37);
    assert_eq!(report.get("fisher_transform").unwrap().cases, 37);
}

#[test]
fn requires_filter_is_sound() {
    let seen = Arc::new(AtomicUsize::new(0));
    let violations = Arc::new(AtomicUsize::new(0));
    let r = Registry::new();
    let (s, v) = (seen.clone(), violations.clone());
    r.register(
        "half_open",
        Contract::new()
            .accepts("x", number())
            .accepts("y", integer())
            .returns(number())
            .requires("x > 0.5 and y != 0"),
        move |a: &mut Arguments| {
            s.fetch_add(1, Ordering::SeqCst);
            let x = a.get("x").and_then(Value::as_f64).unwrap();
            let y = a.get("y").and_then(Value::as_f64).unwrap();
            if !(x > 0.5 && y != 0.0) {
                v.fetch_add(1, Ordering::SeqCst);
            }
            Ok(Value::Float(x / y))
        },
    )
    .unwrap();
    let report = run_autotests(&r, &plan(80)).unwrap();
    let f = report.get("half_open").unwrap();
    assert!(matches!(f.outcome, Outcome::Passed { cases: 80 }), "{:?}", f.outcome);
    assert_eq!(violations.load(Ordering::SeqCst), 0);
    assert_eq!(seen.load(Ordering::SeqCst), 80);
    assert!(f.draws > 80);
}

#[test]
fn untestable_reasons() {
    let r = Registry::new();
    let id = |a: &mut Arguments| Ok(a.get("x").cloned().unwrap_or(Value::None));
    r.register("untyped", Contract::new().accepts_untyped("x").returns(unchecked()), id).unwrap();
    r.register("opaque", Contract::new().accepts("x", function()).returns(unchecked()), id).unwrap();
    r.register(
        "impossible",
        Contract::new().accepts("x", integer()).returns(integer()).requires("x != x"),
        id,
    )
    .unwrap();
    let report = run_autotests(&r, &plan(10)).unwrap();
    let reasons: Vec<(&str, &str)> = report.untestable().map(|(n, u)| (n, u.code())).collect();
    assert_eq!(
        reasons,
        [
            ("impossible", "no-candidate-passed-requires"),
            ("opaque", "ungeneratable-arg-type"),
            ("untyped", "unspecified-types"),
        ]
    );
    let Outcome::Untestable(Untestable::NoCandidatePassedRequires { draws }) = &report.get("impossible").unwrap().outcome
    else {
        unreachable!()
    };
    assert_eq!(*draws, plan(10).draw_budget());
    assert!(!report.has_failures());
}

#[test]
fn slow_cases_are_killed_not_the_run() {
    let r = Registry::new();
    r.register(
        "sometimes_slow",
        Contract::new().accepts("n", natural0()).returns(natural0()),
        |a: &mut Arguments| {
            let n = a.get("n").and_then(Value::as_i64).unwrap_or(0);
            if n % 2 == 1 {
                std::thread::sleep(Duration::from_millis(400));
            }
            Ok(Value::int(n))
        },
    )
    .unwrap();
    r.register(
        "fast",
        Contract::new().accepts("n", natural0()).returns(natural0()),
        |a: &mut Arguments| Ok(a.get("n").cloned().unwrap()),
    )
    .unwrap();
    let p = TestPlan {
        max_cases: 20,
        case_timeout: Duration::from_millis(50),
        max_kills: 2,
        ..TestPlan::default()
    };
    let report = run_autotests(&r, &p).unwrap();
    match report.get("sometimes_slow").unwrap().outcome {
        Outcome::TimedOut { killed, completed } => {
            assert_eq!(killed, 2);
            assert!(completed >= 1);
        }
        ref o => panic!("{o:?}"),
    }
    assert!(matches!(report.get("fast").unwrap().outcome, Outcome::Passed { cases: 20 }));
    assert!(!report.has_failures());
}

#[test]
fn failures_shrink_toward_zero() {
    let f = ContractedFunction::new(
        "never_positive",
        Contract::new()
            .accepts("x", or([range(0.3, 0.4), range(-0.1, 0.1)]))
            .returns(positive()),
        |_: &mut Arguments| Ok(Value::Float(-1.0)),
    )
    .unwrap();
    let Outcome::Failed(fail) = test_function(&f, &plan(10)).outcome else {
        panic!("expected a failure");
    };
    let x0 = fail.original_args.get("x").and_then(Value::as_f64).unwrap();
    assert!((0.3..=0.4).contains(&x0), "{x0}");
    assert_eq!(fail.args.get("x").and_then(Value::as_f64), Some(0.0));
    assert!(replay(&f, &fail).is_some());
}

#[test]
fn shrinking_keeps_the_failure_class() {
    // Fails only for lists holding a negative number; the shrunk witness
    // must still hold one.
    let f = ContractedFunction::new(
        "no_negatives",
        Contract::new().accepts("xs", list(range(-50.0, 50.0))).returns(positive0()),
        |a: &mut Arguments| {
            let xs = a.get("xs").and_then(Value::as_items).ok_or_else(|| HostError::from(String::from("xs")))?;
            let m = xs.iter().filter_map(Value::as_f64).fold(0.0, f64::min);
            Ok(Value::Float(m))
        },
    )
    .unwrap();
    let Outcome::Failed(fail) = test_function(&f, &plan(100)).outcome else {
        panic!("expected a failure");
    };
    let xs = fail.args.get("xs").and_then(Value::as_items).unwrap();
    assert_eq!(xs.len(), 1, "{:?}", fail.args);
    assert!(xs[0].as_f64().unwrap() < 0.0);
    assert!(replay(&f, &fail).is_some());
}

#[test]
fn hyperproperty_failures_replay_with_history() {
    let r = fixtures::suite("examples").unwrap().registry().unwrap();
    let square = r.get("square").unwrap();
    let Outcome::Failed(fail) = test_function(&square, &plan(100)).outcome else {
        panic!("square should fail");
    };
    assert!(fail.hyperproperty());
    assert!(!fail.history.is_empty());
    let err = replay(&square, &fail).expect("replay fails again");
    assert!(err.violation().is_some_and(|v| v.hyperproperty));
}
