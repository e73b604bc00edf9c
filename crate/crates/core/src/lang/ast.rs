use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use num_bigint::BigInt;

use crate::value::Value;

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    None,
    Bool(bool),
    Int(BigInt),
    Float(f64),
    Text(String),
}

impl Literal {
    pub fn to_value(&self) -> Value {
        match self {
            Literal::None => Value::None,
            Literal::Bool(b) => Value::Bool(*b),
            Literal::Int(i) => Value::Int(i.clone()),
            Literal::Float(x) => Value::Float(*x),
            Literal::Text(s) => Value::Text(s.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
    Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Pow => "**",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub(crate) fn prec(self) -> u8 {
        match self {
            BinOp::Or => prec::OR,
            BinOp::And => prec::AND,
            BinOp::Add | BinOp::Sub => prec::ADD,
            BinOp::Mul | BinOp::Div | BinOp::Mod => prec::MUL,
            BinOp::Pow => prec::POW,
            _ => prec::CMP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    All,
    Any,
}

impl Quant {
    pub fn name(self) -> &'static str {
        match self {
            Quant::All => "all",
            Quant::Any => "any",
        }
    }
}

/// Condition expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Literal),
    /// Argument name, `return`, or a quantifier variable.
    Name(String),
    /// Reference into the `depth`-th past execution.
    Primed { name: String, depth: u32 },
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Slice {
        base: Box<Expr>,
        start: Option<Box<Expr>>,
        stop: Option<Box<Expr>>,
        step: Option<Box<Expr>>,
    },
    Attr(Box<Expr>, String),
    Call(String, Vec<Expr>),
    Quantifier {
        kind: Quant,
        body: Box<Expr>,
        var: String,
        iter: Box<Expr>,
    },
}

/// Binding powers, low to high.
pub(crate) mod prec {
    pub const IFF: u8 = 1;
    pub const IMPLIES: u8 = 2;
    pub const OR: u8 = 3;
    pub const AND: u8 = 4;
    pub const NOT: u8 = 5;
    pub const CMP: u8 = 6;
    pub const ADD: u8 = 7;
    pub const MUL: u8 = 8;
    pub const UNARY: u8 = 9;
    pub const POW: u8 = 10;
    pub const POSTFIX: u8 = 11;
    pub const ATOM: u8 = 12;
}

impl Expr {
    pub fn name(n: impl Into<String>) -> Expr {
        Expr::Name(n.into())
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Lit(Literal::Int(i)) if i.sign() == num_bigint::Sign::Minus => prec::UNARY,
            Expr::Lit(Literal::Float(x)) if x.is_sign_negative() => prec::UNARY,
            Expr::Lit(_) | Expr::Name(_) | Expr::Primed { .. } => prec::ATOM,
            Expr::Call(..) | Expr::Quantifier { .. } => prec::ATOM,
            Expr::Unary(UnaryOp::Not, _) => prec::NOT,
            Expr::Unary(..) => prec::UNARY,
            Expr::Binary(op, ..) => op.prec(),
            Expr::Implies(..) => prec::IMPLIES,
            Expr::Iff(..) => prec::IFF,
            Expr::Index(..) | Expr::Slice { .. } | Expr::Attr(..) => prec::POSTFIX,
        }
    }

    /// Deepest backtick count among primed references; `0` when the
    /// expression needs no history.
    pub fn backtick_depth(&self) -> u32 {
        let mut depth = 0;
        self.visit(&mut |e| {
            if let Expr::Primed { depth: d, .. } = e {
                depth = depth.max(*d);
            }
        });
        depth
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Lit(_) | Expr::Name(_) | Expr::Primed { .. } => {}
            Expr::Unary(_, e) | Expr::Attr(e, _) => e.visit(f),
            Expr::Binary(_, l, r) | Expr::Implies(l, r) | Expr::Iff(l, r) | Expr::Index(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Expr::Slice {
                base,
                start,
                stop,
                step,
            } => {
                base.visit(f);
                for part in [start, stop, step].into_iter().flatten() {
                    part.visit(f);
                }
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.visit(f)),
            Expr::Quantifier { body, iter, .. } => {
                iter.visit(f);
                body.visit(f);
            }
        }
    }

    /// Names referenced but not bound by an enclosing quantifier, with
    /// their backtick depth. Each (name, depth) pair appears once.
    pub fn free_names(&self) -> Vec<(String, u32)> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    /// Helper names called, in first-use order.
    pub fn called_helpers(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Call(name, _) = e {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        });
        out
    }

    /// Attribute names accessed, in first-use order.
    pub fn attributes(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Attr(_, name) = e {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        });
        out
    }

    /// Canonical source text with the fewest parentheses that parse back
    /// to the same tree.
    pub fn unparse(&self) -> String {
        let mut s = String::new();
        let _ = write_expr(&mut s, self);
        s
    }
}

fn collect_free(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<(String, u32)>) {
    let mut push = |name: &str, depth: u32| {
        if !out.iter().any(|(n, d)| n == name && *d == depth) {
            out.push((name.into(), depth));
        }
    };
    match e {
        Expr::Name(n) => {
            if !bound.iter().any(|b| b == n) {
                push(n, 0);
            }
        }
        Expr::Primed { name, depth } => push(name, *depth),
        Expr::Lit(_) => {}
        Expr::Unary(_, x) | Expr::Attr(x, _) => collect_free(x, bound, out),
        Expr::Binary(_, l, r) | Expr::Implies(l, r) | Expr::Iff(l, r) | Expr::Index(l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        Expr::Slice {
            base,
            start,
            stop,
            step,
        } => {
            collect_free(base, bound, out);
            for part in [start, stop, step].into_iter().flatten() {
                collect_free(part, bound, out);
            }
        }
        Expr::Call(_, args) => {
            for a in args {
                collect_free(a, bound, out);
            }
        }
        Expr::Quantifier { body, var, iter, .. } => {
            collect_free(iter, bound, out);
            bound.push(var.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
    }
}

fn write_child(out: &mut String, e: &Expr, min: u8) -> fmt::Result {
    if e.prec() < min {
        out.push('(');
        write_expr(out, e)?;
        out.push(')');
        Ok(())
    } else {
        write_expr(out, e)
    }
}

fn write_text_literal(out: &mut String, s: &str) {
    out.push('\'');
    for c in s.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            c => out.push(c),
        }
    }
    out.push('\'');
}

fn write_expr(out: &mut String, e: &Expr) -> fmt::Result {
    match e {
        Expr::Lit(Literal::None) => out.push_str("None"),
        Expr::Lit(Literal::Bool(true)) => out.push_str("True"),
        Expr::Lit(Literal::Bool(false)) => out.push_str("False"),
        Expr::Lit(Literal::Int(i)) => write!(out, "{i}")?,
        Expr::Lit(Literal::Float(x)) => write!(out, "{x:?}")?,
        Expr::Lit(Literal::Text(s)) => write_text_literal(out, s),
        Expr::Name(n) => out.push_str(n),
        Expr::Primed { name, depth } => {
            out.push_str(name);
            for _ in 0..*depth {
                out.push('`');
            }
        }
        Expr::Unary(op, x) => {
            let (sym, min) = match op {
                UnaryOp::Not => ("not ", prec::NOT),
                UnaryOp::Neg => ("-", prec::UNARY),
                UnaryOp::Pos => ("+", prec::UNARY),
            };
            out.push_str(sym);
            write_child(out, x, min)?;
        }
        Expr::Binary(op, l, r) => {
            let p = op.prec();
            let (lmin, rmin) = match op {
                BinOp::Pow => (p + 1, prec::UNARY),
                _ if op.is_comparison() => (p + 1, p + 1),
                _ => (p, p + 1),
            };
            write_child(out, l, lmin)?;
            write!(out, " {} ", op.symbol())?;
            write_child(out, r, rmin)?;
        }
        Expr::Implies(l, r) => {
            write_child(out, l, prec::IMPLIES + 1)?;
            out.push_str(" --> ");
            write_child(out, r, prec::IMPLIES)?;
        }
        Expr::Iff(l, r) => {
            write_child(out, l, prec::IFF)?;
            out.push_str(" <--> ");
            write_child(out, r, prec::IFF + 1)?;
        }
        Expr::Index(base, idx) => {
            write_child(out, base, prec::POSTFIX)?;
            out.push('[');
            write_expr(out, idx)?;
            out.push(']');
        }
        Expr::Slice {
            base,
            start,
            stop,
            step,
        } => {
            write_child(out, base, prec::POSTFIX)?;
            out.push('[');
            if let Some(x) = start {
                write_expr(out, x)?;
            }
            out.push(':');
            if let Some(x) = stop {
                write_expr(out, x)?;
            }
            if let Some(x) = step {
                out.push(':');
                write_expr(out, x)?;
            }
            out.push(']');
        }
        Expr::Attr(base, name) => {
            // `1.shape` would lex as a float.
            let numeric = matches!(&**base, Expr::Lit(Literal::Int(_) | Literal::Float(_)));
            if numeric {
                out.push('(');
                write_expr(out, base)?;
                out.push(')');
            } else {
                write_child(out, base, prec::POSTFIX)?;
            }
            out.push('.');
            out.push_str(name);
        }
        Expr::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a)?;
            }
            out.push(')');
        }
        Expr::Quantifier {
            kind,
            body,
            var,
            iter,
        } => {
            write!(out, "{}(", kind.name())?;
            write_expr(out, body)?;
            write!(out, " for {var} in ")?;
            write_expr(out, iter)?;
            out.push(')');
        }
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.unparse())
    }
}
