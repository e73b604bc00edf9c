use std::collections::BTreeMap;

use proptest::prelude::*;
use refineguard_core::lang::{
    evaluate, evaluate_condition, parse, slice_indices, BinOp, Bindings, EvalEnv, Expr, Literal, Namespace, Quant,
    UnaryOp,
};
use refineguard_core::Value;

const CORPUS: &[&str] = &[
    "t >= t` --> return >= return`",
    "return.shape == corr_values.shape",
    "all(seq[i] != return[::-1][i] for i in range(0, len(seq)))",
    "x > 0",
    "x > x`",
    "x` > x``",
    "1 == 1 <--> 2 == 2",
    "abs(sum(p) - 1) < 1e-9",
    "all(q >= 0 for q in p)",
    "not (a and b) or c",
    "a --> b --> c",
    "(a --> b) --> c",
    "x ** -1 <= 2.5",
    "len(s[1:-1]) == len(s) - 2",
    "any(c == 'A' for c in seq)",
    "min(a, b) <= max(a, b)",
    "x % 3 != 0 and -x < 0",
];

fn env_eval(src: &str, frames: &[&dyn Bindings]) -> Value {
    let ns = Namespace::builtins();
    evaluate(&parse(src).unwrap(), &EvalEnv::new(frames, &ns)).unwrap()
}

fn holds(src: &str, frames: &[&dyn Bindings]) -> bool {
    let ns = Namespace::builtins();
    evaluate_condition(&parse(src).unwrap(), &EvalEnv::new(frames, &ns)).unwrap()
}

#[test]
fn golden_round_trip() {
    for src in CORPUS {
        let e = parse(src).unwrap();
        let squeeze = |s: &str| s.split_whitespace().collect::<String>();
        assert_eq!(squeeze(&e.unparse()), squeeze(src), "{src}");
        assert_eq!(parse(&e.unparse()).unwrap(), e);
    }
}

#[test]
fn known_conditions_evaluate() {
    let seq = Value::Seq(vec![Value::text("A"), Value::text("T"), Value::text("C")]);
    let ret = Value::Seq(vec![Value::text("G"), Value::text("A"), Value::text("T")]);
    let frame = [("seq", seq.clone()), ("return", ret)];
    assert!(holds(
        "all(seq[i] != return[::-1][i] for i in range(0, len(seq)))",
        &[&frame]
    ));
    let now = [("t", Value::int(3)), ("return", Value::int(27))];
    let then = [("t", Value::int(2)), ("return", Value::int(8))];
    assert!(holds("t >= t` --> return >= return`", &[&now, &then]));
    assert!(holds("1 == 1 <--> 2 == 2", &[]));
    let wrong = [("seq", seq), ("return", Value::Seq(vec![Value::text("T"); 3]))];
    assert!(!holds(
        "all(seq[i] != return[::-1][i] for i in range(0, len(seq)))",
        &[&wrong]
    ));
}

#[test]
fn implication_and_biconditional_truth_tables() {
    for a in [false, true] {
        for b in [false, true] {
            let frame = [("a", Value::Bool(a)), ("b", Value::Bool(b))];
            assert_eq!(holds("a --> b", &[&frame]), !a || b, "{a} --> {b}");
            assert_eq!(holds("a <--> b", &[&frame]), a == b, "{a} <--> {b}");
            assert_eq!(holds("not a or b", &[&frame]), holds("a --> b", &[&frame]));
        }
    }
    // The right operand of an implication is not evaluated when the left is false.
    assert!(holds("False --> xs[99] == 0", &[&[("xs", Value::Seq(vec![]))]]));
}

/// Slicing rules written out directly, independently of the evaluator.
fn reference_slice(len: usize, start: Option<i64>, stop: Option<i64>, step: i64) -> Vec<usize> {
    let n = len as i64;
    let clamp = |i: i64, lo: i64, hi: i64| i.max(lo).min(hi);
    let norm = |i: i64| if i < 0 { i + n } else { i };
    let mut out = Vec::new();
    if step > 0 {
        let mut i = start.map_or(0, |s| clamp(norm(s), 0, n));
        let end = stop.map_or(n, |s| clamp(norm(s), 0, n));
        while i < end {
            out.push(i as usize);
            i += step;
        }
    } else {
        let mut i = start.map_or(n - 1, |s| clamp(norm(s), -1, n - 1));
        let end = stop.map_or(-1, |s| clamp(norm(s), -1, n - 1));
        while i > end {
            out.push(i as usize);
            i += step;
        }
    }
    out
}

fn slice_src(start: Option<i64>, stop: Option<i64>, step: Option<i64>) -> String {
    let f = |o: Option<i64>| o.map_or(String::new(), |v| v.to_string());
    format!("s[{}:{}:{}]", f(start), f(stop), f(step))
}

#[test]
fn slicing_matches_reference_and_golden() {
    let golden = include_str!("data/slices.txt");
    let opt = |s: &str| if s == "_" { None } else { Some(s.parse::<i64>().unwrap()) };
    let mut checked = 0;
    for line in golden.lines().filter(|l| !l.starts_with('#')) {
        let (lhs, rhs) = line.split_once("->").unwrap();
        let f: Vec<&str> = lhs.split_whitespace().collect();
        let len: usize = f[0].parse().unwrap();
        let (start, stop, step) = (opt(f[1]), opt(f[2]), opt(f[3]));
        let want: Vec<usize> = rhs.split_whitespace().map(|x| x.parse().unwrap()).collect();
        let s = step.unwrap_or(1);
        assert_eq!(reference_slice(len, start, stop, s), want, "reference {line}");
        assert_eq!(slice_indices(len, start, stop, s), want, "slice_indices {line}");
        let items: Vec<Value> = (0..len as i64).map(Value::int).collect();
        let frame = [("s", Value::Seq(items))];
        let got = env_eval(&slice_src(start, stop, step), &[&frame]);
        let want_v = Value::Seq(want.iter().map(|&i| Value::int(i as i64)).collect());
        assert_eq!(got, want_v, "evaluated {line}");
        checked += 1;
    }
    // Six lengths, eight choices for start and stop, seven non-zero steps.
    assert_eq!(checked, 6 * 8 * 8 * 8 - 6 * 8 * 8);
}

#[test]
fn quantifiers_match_elementwise_evaluation() {
    let domain = [-2i64, 0, 1, 3];
    let bodies = ["x > 0", "x % 2 == 0", "x * x < 4"];
    let ns = Namespace::builtins();
    for len in 0..=6usize {
        let total = domain.len().pow(len as u32);
        for code in 0..total {
            let mut c = code;
            let xs: Vec<i64> = (0..len)
                .map(|_| {
                    let v = domain[c % domain.len()];
                    c /= domain.len();
                    v
                })
                .collect();
            let seq = Value::Seq(xs.iter().copied().map(Value::int).collect());
            let frame = [("s", seq)];
            for body in bodies {
                let each: Vec<bool> = xs
                    .iter()
                    .map(|&x| {
                        let f = [("x", Value::int(x))];
                        evaluate_condition(&parse(body).unwrap(), &EvalEnv::new(&[&f], &ns)).unwrap()
                    })
                    .collect();
                let all = holds(&format!("all({body} for x in s)"), &[&frame]);
                let any = holds(&format!("any({body} for x in s)"), &[&frame]);
                assert_eq!(all, each.iter().all(|&b| b), "all {body} {xs:?}");
                assert_eq!(any, each.iter().any(|&b| b), "any {body} {xs:?}");
            }
        }
    }
}

#[test]
fn nan_and_division_follow_ieee() {
    let frame = [("x", Value::Float(f64::NAN)), ("z", Value::int(0))];
    assert!(!holds("x == x", &[&frame]));
    assert!(!holds("x < 1 or x >= 1", &[&frame]));
    assert!(holds("1 / z > 1e308", &[&frame]));
    let Value::Float(f) = env_eval("0 / z", &[&frame]) else { panic!() };
    assert!(f.is_nan());
}

#[test]
fn helpers_and_maps() {
    let mut m = BTreeMap::new();
    m.insert("xs".to_string(), Value::Seq(vec![Value::int(4), Value::int(-1), Value::int(2)]));
    assert_eq!(env_eval("sum(xs)", &[&m]), Value::int(5));
    assert_eq!(env_eval("min(xs)", &[&m]), Value::int(-1));
    assert_eq!(env_eval("max(xs[1:])", &[&m]), Value::int(2));
    assert_eq!(env_eval("abs(xs[-2])", &[&m]), Value::int(1));
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i64..1000).prop_map(|i| Expr::Lit(Literal::Int(i.into()))),
        (0u32..64).prop_map(|i| Expr::Lit(Literal::Float(f64::from(i) * 0.25))),
        any::<bool>().prop_map(|b| Expr::Lit(Literal::Bool(b))),
        Just(Expr::Lit(Literal::None)),
        "[a-z]{0,4}".prop_map(|s| Expr::Lit(Literal::Text(s))),
        prop::sample::select(vec!["a", "b", "xs", "return"]).prop_map(Expr::name),
        (prop::sample::select(vec!["t", "y"]), 1u32..4).prop_map(|(n, d)| Expr::Primed {
            name: n.to_string(),
            depth: d
        }),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let ops = vec![
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
        BinOp::Pow,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
    ];
    leaf().prop_recursive(5, 48, 3, move |inner| {
        prop_oneof![
            (prop::sample::select(ops.clone()), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Expr::Binary(op, Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::Implies(Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::Iff(Box::new(l), Box::new(r))),
            (prop::sample::select(vec![UnaryOp::Not, UnaryOp::Neg, UnaryOp::Pos]), inner.clone())
                .prop_map(|(op, e)| Expr::Unary(op, Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(b, i)| Expr::Index(Box::new(b), Box::new(i))),
            (
                inner.clone(),
                prop::option::of(inner.clone()),
                prop::option::of(inner.clone()),
                prop::option::of(inner.clone())
            )
                .prop_map(|(b, s, e, st)| Expr::Slice {
                    base: Box::new(b),
                    start: s.map(Box::new),
                    stop: e.map(Box::new),
                    step: st.map(Box::new),
                }),
            inner.clone().prop_map(|b| Expr::Attr(Box::new(b), "shape".into())),
            prop::collection::vec(inner.clone(), 0..3).prop_map(|a| Expr::Call("max".into(), a)),
            (prop::sample::select(vec![Quant::All, Quant::Any]), inner.clone(), inner.clone()).prop_map(
                |(kind, body, iter)| Expr::Quantifier {
                    kind,
                    body: Box::new(body),
                    var: "v".into(),
                    iter: Box::new(iter),
                }
            ),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parse_inverts_unparse(e in expr()) {
        let src = e.unparse();
        let back = parse(&src).map_err(|err| TestCaseError::fail(format!("{src}: {err}")))?;
        prop_assert_eq!(back, e, "{}", src);
    }
}
