//! Pratt parser for condition expressions.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::{prec, BinOp, Expr, Literal, Quant, UnaryOp};
use super::lexer::{tokenize, Spanned, Tok};
use super::ParseError;

/// Nesting limit; deeper sources are rejected rather than overflowing the stack.
const MAX_NESTING: usize = 200;

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    if matches!(toks[0].tok, Tok::Eof) {
        return Err(ParseError {
            line: 1,
            col: 1,
            message: "empty condition".into(),
            expected: vec!["expression".into()],
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        nesting: 0,
    };
    let e = p.expr(0)?;
    match p.peek() {
        Tok::Eof => Ok(e),
        _ => Err(p.unexpected(&["operator", "end of input"])),
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    nesting: usize,
}

fn infix(tok: &Tok) -> Option<(u8, Infix)> {
    let bin = |op: BinOp| Some((op.prec(), Infix::Bin(op)));
    match tok {
        Tok::Iff => Some((prec::IFF, Infix::Iff)),
        Tok::Implies => Some((prec::IMPLIES, Infix::Implies)),
        Tok::Or => bin(BinOp::Or),
        Tok::And => bin(BinOp::And),
        Tok::EqEq => bin(BinOp::Eq),
        Tok::NotEq => bin(BinOp::Ne),
        Tok::Lt => bin(BinOp::Lt),
        Tok::Le => bin(BinOp::Le),
        Tok::Gt => bin(BinOp::Gt),
        Tok::Ge => bin(BinOp::Ge),
        Tok::Plus => bin(BinOp::Add),
        Tok::Minus => bin(BinOp::Sub),
        Tok::Star => bin(BinOp::Mul),
        Tok::Slash => bin(BinOp::Div),
        Tok::Percent => bin(BinOp::Mod),
        Tok::Pow => bin(BinOp::Pow),
        Tok::LParen | Tok::LBracket | Tok::Dot => Some((prec::POSTFIX, Infix::Postfix)),
        _ => None,
    }
}

enum Infix {
    Bin(BinOp),
    Implies,
    Iff,
    Postfix,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if !matches!(t, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let here = self.here();
        ParseError {
            line: here.line,
            col: here.col,
            message: format!("unexpected {}", here.tok),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&[&tok.to_string()]))
        }
    }

    fn expr(&mut self, min: u8) -> Result<Expr, ParseError> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return Err(self.unexpected(&["shallower nesting"]));
        }
        let r = self.expr_inner(min);
        self.nesting -= 1;
        r
    }

    fn expr_inner(&mut self, min: u8) -> Result<Expr, ParseError> {
        let (mut lhs, mut grouped) = self.prefix(min)?;
        while let Some((bp, kind)) = infix(self.peek()) {
            if bp < min {
                break;
            }
            if let Expr::Binary(op, ..) = &lhs {
                if op.is_comparison() && bp == prec::CMP && !grouped {
                    return Err(ParseError {
                        message: "comparisons do not chain; combine them with `and`".into(),
                        ..self.unexpected(&["`and`", "`or`", "`-->`", "`<-->`", "end of input"])
                    });
                }
            }
            lhs = match kind {
                Infix::Postfix => self.postfix(lhs)?,
                Infix::Bin(op) => {
                    self.advance();
                    let rmin = match op {
                        BinOp::Pow => prec::UNARY,
                        _ => bp + 1,
                    };
                    let rhs = self.expr(rmin)?;
                    Expr::binary(op, lhs, rhs)
                }
                Infix::Implies => {
                    self.advance();
                    let rhs = self.expr(prec::IMPLIES)?;
                    Expr::Implies(Box::new(lhs), Box::new(rhs))
                }
                Infix::Iff => {
                    self.advance();
                    let rhs = self.expr(prec::IFF + 1)?;
                    Expr::Iff(Box::new(lhs), Box::new(rhs))
                }
            };
            grouped = false;
        }
        Ok(lhs)
    }

    /// The operand and whether it was parenthesized.
    fn prefix(&mut self, min: u8) -> Result<(Expr, bool), ParseError> {
        if *self.peek() == Tok::LParen {
            self.advance();
            let e = self.expr(0)?;
            self.expect(Tok::RParen)?;
            return Ok((e, true));
        }
        self.atom(min).map(|e| (e, false))
    }

    fn atom(&mut self, min: u8) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                if min > prec::NOT {
                    return Err(self.unexpected(&["operand"]));
                }
                self.advance();
                let e = self.expr(prec::NOT)?;
                Ok(Expr::Unary(UnaryOp::Not, Box::new(e)))
            }
            Tok::Minus | Tok::Plus => {
                let op = if matches!(self.advance(), Tok::Minus) {
                    UnaryOp::Neg
                } else {
                    UnaryOp::Pos
                };
                let e = self.expr(prec::UNARY)?;
                Ok(Expr::Unary(op, Box::new(e)))
            }
            Tok::Int(i) => {
                self.advance();
                Ok(Expr::Lit(Literal::Int(i)))
            }
            Tok::Float(x) => {
                self.advance();
                Ok(Expr::Lit(Literal::Float(x)))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Expr::Lit(Literal::Text(s)))
            }
            Tok::True | Tok::False => {
                let b = matches!(self.advance(), Tok::True);
                Ok(Expr::Lit(Literal::Bool(b)))
            }
            Tok::None => {
                self.advance();
                Ok(Expr::Lit(Literal::None))
            }
            Tok::Name(name, depth) => {
                self.advance();
                if depth > 0 {
                    return Ok(Expr::Primed { name, depth });
                }
                if *self.peek() == Tok::LParen {
                    return self.call(name);
                }
                Ok(Expr::Name(name))
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    fn call(&mut self, name: String) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let arg = self.expr(0)?;
                if *self.peek() == Tok::For {
                    return self.quantifier(name, arg, args.is_empty());
                }
                args.push(arg);
                if *self.peek() == Tok::Comma {
                    self.advance();
                    continue;
                }
                break;
            }
        }
        if *self.peek() != Tok::RParen {
            return Err(self.unexpected(&["`,`", "`)`"]));
        }
        self.advance();
        Ok(Expr::Call(name, args))
    }

    fn quantifier(&mut self, name: String, body: Expr, only_arg: bool) -> Result<Expr, ParseError> {
        let kind = match name.as_str() {
            "all" => Quant::All,
            "any" => Quant::Any,
            _ => {
                return Err(ParseError {
                    message: format!("`{name}` does not take a `for` clause; only `all` and `any` do"),
                    ..self.unexpected(&["`,`", "`)`"])
                })
            }
        };
        if !only_arg {
            return Err(self.unexpected(&["`,`", "`)`"]));
        }
        self.advance();
        let var = match self.advance() {
            Tok::Name(v, 0) => v,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected(&["variable name"]));
            }
        };
        if var == "return" {
            self.pos -= 1;
            return Err(self.unexpected(&["variable name"]));
        }
        self.expect(Tok::In)?;
        let iter = self.expr(0)?;
        self.expect(Tok::RParen)?;
        Ok(Expr::Quantifier {
            kind,
            body: Box::new(body),
            var,
            iter: Box::new(iter),
        })
    }

    fn postfix(&mut self, base: Expr) -> Result<Expr, ParseError> {
        match self.advance() {
            Tok::Dot => match self.advance() {
                Tok::Name(field, 0) => Ok(Expr::Attr(Box::new(base), field)),
                _ => {
                    self.pos -= 1;
                    Err(self.unexpected(&["attribute name"]))
                }
            },
            Tok::LBracket => self.subscript(base),
            Tok::LParen => {
                self.pos -= 1;
                Err(self.unexpected(&["operator"]))
            }
            _ => unreachable!("postfix called on a non-postfix token"),
        }
    }

    fn subscript(&mut self, base: Expr) -> Result<Expr, ParseError> {
        let part = |p: &mut Parser| -> Result<Option<Box<Expr>>, ParseError> {
            match p.peek() {
                Tok::Colon | Tok::RBracket => Ok(None),
                _ => Ok(Some(Box::new(p.expr(0)?))),
            }
        };
        let start = part(self)?;
        if *self.peek() != Tok::Colon {
            self.expect(Tok::RBracket)?;
            return match start {
                Some(idx) => Ok(Expr::Index(Box::new(base), idx)),
                None => Err(self.unexpected(&["index expression"])),
            };
        }
        self.advance();
        let stop = part(self)?;
        let mut step = None;
        if *self.peek() == Tok::Colon {
            self.advance();
            step = part(self)?;
        }
        self.expect(Tok::RBracket)?;
        Ok(Expr::Slice {
            base: Box::new(base),
            start,
            stop,
            step,
        })
    }
}
