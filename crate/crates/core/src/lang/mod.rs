//! The condition language used in `requires` and `ensures` clauses.
//!
//! A closed expression grammar: literals, argument references (primed with
//! backticks to reach past executions), arithmetic, comparisons, boolean
//! connectives with `-->` and `<-->`, indexing and slicing, whitelisted
//! attributes, helper calls, and single-variable `all`/`any` quantifiers.

mod ast;
mod eval;
mod helpers;
mod lexer;
mod parser;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

pub use ast::{BinOp, Expr, Literal, Quant, UnaryOp};
pub use eval::{evaluate, evaluate_condition, iterate, slice_indices, Bindings, EvalEnv};
pub use helpers::{AccessorFn, HelperFn, Namespace, MAX_RANGE_LEN};
pub use parser::parse;

/// Syntax error with a 1-based position and the tokens that would have
/// been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("type error: {0}")]
    Type(String),
    #[error("name `{name}` is not bound at backtick depth {depth}")]
    NameUnbound { name: String, depth: u32 },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfBounds { index: String, len: usize },
    #[error("malformed contract: {0}")]
    Malformed(String),
}

/// Deepest backtick count in `e`.
pub fn backtick_depth(e: &Expr) -> u32 {
    e.backtick_depth()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::boxed::Box;
    use alloc::string::ToString;
    use alloc::vec;

    fn n(s: &str) -> Box<Expr> {
        Box::new(Expr::name(s))
    }

    fn p(s: &str, d: u32) -> Box<Expr> {
        Box::new(Expr::Primed {
            name: s.to_string(),
            depth: d,
        })
    }

    #[test]
    fn monotonic_condition_tree() {
        let e = parse("t >= t` --> return >= return`").unwrap();
        let want = Expr::Implies(
            Box::new(Expr::Binary(BinOp::Ge, n("t"), p("t", 1))),
            Box::new(Expr::Binary(BinOp::Ge, n("return"), p("return", 1))),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn shape_condition_tree() {
        let e = parse("return.shape == \\\n    corr_values.shape").unwrap();
        let want = Expr::Binary(
            BinOp::Eq,
            Box::new(Expr::Attr(n("return"), "shape".into())),
            Box::new(Expr::Attr(n("corr_values"), "shape".into())),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn complement_condition_tree() {
        let e = parse("all(seq[i] != return[::-1][i] for i in range(0, len(seq)))").unwrap();
        let reversed = Expr::Slice {
            base: n("return"),
            start: None,
            stop: None,
            step: Some(Box::new(Expr::Unary(
                UnaryOp::Neg,
                Box::new(Expr::Lit(Literal::Int(1.into()))),
            ))),
        };
        let want = Expr::Quantifier {
            kind: Quant::All,
            body: Box::new(Expr::Binary(
                BinOp::Ne,
                Box::new(Expr::Index(n("seq"), n("i"))),
                Box::new(Expr::Index(Box::new(reversed), n("i"))),
            )),
            var: "i".into(),
            iter: Box::new(Expr::Call(
                "range".into(),
                vec![
                    Expr::Lit(Literal::Int(0.into())),
                    Expr::Call("len".into(), vec![Expr::name("seq")]),
                ],
            )),
        };
        assert_eq!(e, want);
    }

    #[test]
    fn depths() {
        assert_eq!(backtick_depth(&parse("x > 0").unwrap()), 0);
        assert_eq!(backtick_depth(&parse("x > x`").unwrap()), 1);
        assert_eq!(backtick_depth(&parse("x` > x``").unwrap()), 2);
    }

    #[test]
    fn precedence() {
        let cases = [
            ("a or b --> c", "(a or b) --> c"),
            ("a --> b --> c", "a --> (b --> c)"),
            ("a <--> b <--> c", "(a <--> b) <--> c"),
            ("a --> b <--> c", "(a --> b) <--> c"),
            ("not a and b", "(not a) and b"),
            ("not a == b", "not (a == b)"),
            ("-a ** b", "-(a ** b)"),
            ("a ** b ** c", "a ** (b ** c)"),
            ("a - b - c", "(a - b) - c"),
            ("a + b * c % d", "a + ((b * c) % d)"),
            ("(a < b) == c", "(a < b) == c"),
        ];
        for (src, grouped) in cases {
            assert_eq!(parse(src).unwrap(), parse(grouped).unwrap(), "{src}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("a < b < c").unwrap_err();
        assert_eq!((e.line, e.col), (1, 7));
        let e = parse("x +\n  ").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.expected.contains(&"expression".to_string()));
        assert!(parse("").is_err());
        assert!(parse("f(x for x in y)").is_err());
        assert!(parse("a == not b").is_err());
        assert!(parse("all(x for x in s, 1)").is_err());
        assert!(parse("a[]").is_err());
        assert!(parse("x``` ` y").is_err());
    }

    #[test]
    fn unparse_minimal_parens() {
        let cases = [
            ("(a + b) * c", "(a + b) * c"),
            ("a + (b * c)", "a + b * c"),
            ("a - (b - c)", "a - (b - c)"),
            ("(-a) ** 2", "(-a) ** 2"),
            ("2 ** -1", "2 ** -1"),
            ("(a --> b) --> c", "(a --> b) --> c"),
            ("a <--> (b <--> c)", "a <--> (b <--> c)"),
            ("not (a and b)", "not (a and b)"),
            ("x[1:]", "x[1:]"),
            ("x[::]", "x[:]"),
            ("(1).shape", "(1).shape"),
            ("f( a ,b )", "f(a, b)"),
            ("s == 'it\\'s'", "s == 'it\\'s'"),
            ("1e-9 < 2.0", "1e-9 < 2.0"),
        ];
        for (src, want) in cases {
            assert_eq!(parse(src).unwrap().unparse(), want, "{src}");
        }
    }
}
