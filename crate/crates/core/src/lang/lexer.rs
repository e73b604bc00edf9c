use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Int(BigInt),
    Float(f64),
    Str(String),
    /// Identifier followed by `depth` backticks.
    Name(String, u32),
    And,
    Or,
    Not,
    True,
    False,
    None,
    For,
    In,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Pow,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Implies,
    Iff,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Int(i) => return write!(f, "integer {i}"),
            Tok::Float(x) => return write!(f, "number {x:?}"),
            Tok::Str(_) => "text literal",
            Tok::Name(n, 0) => return write!(f, "name `{n}`"),
            Tok::Name(n, d) => return write!(f, "name `{n}` with {d} backtick(s)"),
            Tok::And => "`and`",
            Tok::Or => "`or`",
            Tok::Not => "`not`",
            Tok::True => "`True`",
            Tok::False => "`False`",
            Tok::None => "`None`",
            Tok::For => "`for`",
            Tok::In => "`in`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::Percent => "`%`",
            Tok::Pow => "`**`",
            Tok::EqEq => "`==`",
            Tok::NotEq => "`!=`",
            Tok::Lt => "`<`",
            Tok::Le => "`<=`",
            Tok::Gt => "`>`",
            Tok::Ge => "`>=`",
            Tok::Implies => "`-->`",
            Tok::Iff => "`<-->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

/// A token with its 1-based source position.
#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(k, c)| self.peek_at(k) == Some(c))
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>, expected: Vec<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
            expected,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

// Longest operators first.
const OPERATORS: &[(&str, Tok)] = &[
    ("<-->", Tok::Iff),
    ("-->", Tok::Implies),
    ("**", Tok::Pow),
    ("==", Tok::EqEq),
    ("!=", Tok::NotEq),
    ("<=", Tok::Le),
    (">=", Tok::Ge),
    ("<", Tok::Lt),
    (">", Tok::Gt),
    ("+", Tok::Plus),
    ("-", Tok::Minus),
    ("*", Tok::Star),
    ("/", Tok::Slash),
    ("%", Tok::Percent),
    ("(", Tok::LParen),
    (")", Tok::RParen),
    ("[", Tok::LBracket),
    ("]", Tok::RBracket),
    (",", Tok::Comma),
    (":", Tok::Colon),
    (".", Tok::Dot),
];

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut cur = Cursor {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        // Whitespace, including backslash line continuations.
        while let Some(c) = cur.peek() {
            if c.is_whitespace() || (c == '\\' && cur.peek_at(1) == Some('\n')) {
                cur.bump();
            } else {
                break;
            }
        }
        let (line, col) = (cur.line, cur.col);
        let Some(c) = cur.peek() else {
            out.push(Spanned {
                tok: Tok::Eof,
                line,
                col,
            });
            return Ok(out);
        };
        let tok = if c.is_ascii_digit() {
            lex_number(&mut cur)?
        } else if is_ident_start(c) {
            lex_name(&mut cur)?
        } else if c == '\'' || c == '"' {
            lex_string(&mut cur)?
        } else if let Some((op, tok)) = OPERATORS.iter().find(|(op, _)| cur.starts_with(op)) {
            for _ in 0..op.chars().count() {
                cur.bump();
            }
            tok.clone()
        } else if c == '`' {
            return Err(cur.error("backtick must directly follow a name", vec!["name".into()]));
        } else {
            return Err(cur.error(alloc::format!("unexpected character {c:?}"), Vec::new()));
        };
        out.push(Spanned { tok, line, col });
    }
}

fn lex_number(cur: &mut Cursor) -> Result<Tok, ParseError> {
    let mut text = String::new();
    let mut is_float = false;
    while let Some(c) = cur.peek().filter(|c| c.is_ascii_digit() || *c == '_') {
        if c != '_' {
            text.push(c);
        }
        cur.bump();
    }
    if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
        is_float = true;
        text.push('.');
        cur.bump();
        while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
            text.push(c);
            cur.bump();
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let sign = matches!(cur.peek_at(1), Some('+' | '-'));
        let digit_at = if sign { 2 } else { 1 };
        if cur.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            text.push('e');
            cur.bump();
            if sign {
                text.push(cur.bump().unwrap_or('+'));
            }
            while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                text.push(c);
                cur.bump();
            }
        }
    }
    if cur.peek().is_some_and(is_ident_start) {
        return Err(cur.error("malformed number literal", Vec::new()));
    }
    if is_float {
        text.parse::<f64>()
            .map(Tok::Float)
            .map_err(|_| cur.error("malformed number literal", Vec::new()))
    } else {
        text.parse::<BigInt>()
            .map(Tok::Int)
            .map_err(|_| cur.error("malformed integer literal", Vec::new()))
    }
}

fn lex_name(cur: &mut Cursor) -> Result<Tok, ParseError> {
    let mut name = String::new();
    while let Some(c) = cur.peek().filter(|c| is_ident_continue(*c)) {
        name.push(c);
        cur.bump();
    }
    let mut depth = 0;
    while cur.peek() == Some('`') {
        cur.bump();
        depth += 1;
    }
    let keyword = match name.as_str() {
        "and" => Some(Tok::And),
        "or" => Some(Tok::Or),
        "not" => Some(Tok::Not),
        "True" => Some(Tok::True),
        "False" => Some(Tok::False),
        "None" => Some(Tok::None),
        "for" => Some(Tok::For),
        "in" => Some(Tok::In),
        _ => None,
    };
    match keyword {
        Some(_) if depth > 0 => Err(cur.error(
            alloc::format!("keyword `{name}` cannot carry backticks"),
            vec!["name".to_string()],
        )),
        Some(k) => Ok(k),
        None => Ok(Tok::Name(name, depth)),
    }
}

fn lex_string(cur: &mut Cursor) -> Result<Tok, ParseError> {
    let quote = cur.bump().unwrap_or('\'');
    let mut s = String::new();
    loop {
        match cur.bump() {
            None | Some('\n') => {
                return Err(cur.error("unterminated text literal", vec![alloc::format!("{quote}")]))
            }
            Some(c) if c == quote => return Ok(Tok::Str(s)),
            Some('\\') => match cur.bump() {
                Some('n') => s.push('\n'),
                Some('t') => s.push('\t'),
                Some('r') => s.push('\r'),
                Some('0') => s.push('\0'),
                Some(c @ ('\\' | '\'' | '"')) => s.push(c),
                Some(c) => {
                    s.push('\\');
                    s.push(c);
                }
                None => return Err(cur.error("unterminated text literal", Vec::new())),
            },
            Some(c) => s.push(c),
        }
    }
}
