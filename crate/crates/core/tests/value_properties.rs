use proptest::prelude::*;
use refineguard_core::value::{value_cmp, value_eq, Map, NdArray, Value};

fn value() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::None),
        any::<bool>().prop_map(Value::Bool),
        (-50i64..50).prop_map(Value::int),
        (-1e6f64..1e6).prop_map(Value::Float),
        "[a-c]{0,3}".prop_map(Value::text),
        prop::collection::vec(-4.0f64..4.0, 0..6).prop_map(|xs| Value::floats(&xs)),
    ];
    leaf.prop_recursive(3, 32, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Seq),
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Tuple),
            prop::collection::vec(("[a-c]{1,2}", inner), 0..4).prop_map(|kv| {
                Value::Map(Map::from_entries(kv.into_iter().map(|(k, v)| (Value::text(k), v))).unwrap())
            }),
        ]
    })
}

/// Changes something inside every mutable container of `v`.
fn mutate(v: &mut Value) {
    match v {
        Value::Seq(items) | Value::Tuple(items) => {
            items.iter_mut().for_each(mutate);
            items.push(Value::text("mutated"));
        }
        Value::Map(m) => {
            m.iter_mut().for_each(|(_, v)| mutate(v));
            m.insert(Value::text("zz-new"), Value::int(1)).unwrap();
        }
        Value::NdArray(a) => a.data_mut().iter_mut().for_each(|x| *x += 1.0),
        _ => {}
    }
}

proptest! {
    #[test]
    fn snapshots_are_independent(v in value()) {
        let snap = v.deep_snapshot().unwrap();
        let before = snap.render();
        let mut live = v.clone();
        mutate(&mut live);
        prop_assert_eq!(snap.render(), before);
        prop_assert!(value_eq(&snap, &v));
    }

    #[test]
    fn equality_is_an_equivalence(a in value(), b in value(), c in value()) {
        prop_assert!(value_eq(&a, &a));
        prop_assert_eq!(value_eq(&a, &b), value_eq(&b, &a));
        if value_eq(&a, &b) && value_eq(&b, &c) {
            prop_assert!(value_eq(&a, &c));
        }
        prop_assert!(value_eq(&a, &a.clone()));
    }

    #[test]
    fn int_and_float_agree(i in -1_000_000i64..1_000_000) {
        prop_assert!(value_eq(&Value::int(i), &Value::Float(i as f64)));
        prop_assert_eq!(
            value_cmp(&Value::int(i), &Value::Float(i as f64 + 0.5)).unwrap(),
            Some(core::cmp::Ordering::Less)
        );
    }
}

#[test]
fn value_examples() {
    let nan = Value::Float(f64::NAN);
    assert!(!value_eq(&nan, &nan));
    assert!(value_eq(&Value::int(2), &Value::Float(2.0)));
    assert!(!value_eq(
        &Value::Seq(vec![Value::int(1), Value::int(2)]),
        &Value::Tuple(vec![Value::int(1), Value::int(2)])
    ));
    assert_eq!(Value::int(5).render(), "5");
    assert_eq!(Value::chars("ATC").render(), "['A', 'T', 'C']");
    let eye = Value::NdArray(NdArray::new(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap());
    assert_eq!(eye.render(), "NdArray(2×2)[1, 0, 0, 1]");
    assert!(NdArray::new(vec![2, 3], vec![0.0; 5]).is_err());

    let mut m = Map::new();
    m.insert(Value::text("a"), Value::Seq(vec![nan.clone()])).unwrap();
    let snap = Value::Map(m).deep_snapshot().unwrap();
    let Value::Map(m) = snap else { panic!() };
    let Value::Seq(items) = m.get(&Value::text("a")).unwrap() else { panic!() };
    let Value::Float(x) = items[0] else { panic!() };
    assert_eq!(x.to_bits(), f64::NAN.to_bits());
    assert!(Map::new().insert(Value::Float(f64::NAN), Value::None).is_err());
    assert!(Map::new().insert(Value::Seq(vec![]), Value::None).is_err());
}
