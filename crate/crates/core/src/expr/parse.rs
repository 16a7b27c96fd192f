//! Recursive-descent parser.
//!
//! Grammar, lowest to highest precedence:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right-associative)
//! primary := number | ident | ident '(' sum (',' sum)? ')' | '(' sum ')'
//! ```
//!
//! Unary minus binds looser than `^`, so `-2^2` is `-(2^2)`.

use std::fmt;

use super::ast::{BinaryOp, Expr, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    InvalidNumber(String),
    UnknownFunction(String),
    UnknownVariable(String),
    Arity { name: String, expected: usize, found: usize },
}

/// Parse failure at a byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Empty => write!(f, "empty expression")?,
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'")?,
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token `{t}`")?,
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input")?,
            ParseErrorKind::InvalidNumber(t) => write!(f, "invalid number literal `{t}`")?,
            ParseErrorKind::UnknownFunction(n) => write!(f, "unknown function {n}")?,
            ParseErrorKind::UnknownVariable(n) => write!(f, "unknown variable {n}")?,
            ParseErrorKind::Arity {
                name,
                expected,
                found,
            } => write!(f, "function {name} expects {expected} argument(s), found {found}")?,
        }
        write!(f, " at offset {}", self.offset)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Op(c) => c.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
            Tok::End => "<end>".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(c as char), i));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::InvalidNumber(lit.to_string()),
                })?;
                if !value.is_finite() {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::InvalidNumber(lit.to_string()),
                    });
                }
                out.push((Tok::Num(value), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    allowed: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            t => ParseErrorKind::UnexpectedToken(t.describe()),
        };
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinaryOp::Add,
                Tok::Op('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinaryOp::Mul,
                Tok::Op('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            let child = self.unary()?;
            return Ok(Expr::unary(UnaryOp::Neg, child));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (_, at) = self.bump();
                if *self.peek() == Tok::LParen {
                    self.call(name, at)
                } else if self.allowed.contains(&name.as_str()) {
                    Ok(Expr::Var(name))
                } else {
                    Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownVariable(name),
                    })
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn call(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        let expected = if UnaryOp::from_name(&name).is_some() {
            1
        } else if BinaryOp::from_name(&name).is_some() {
            2
        } else {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::UnknownFunction(name),
            });
        };
        self.expect(Tok::LParen)?;
        let mut args = vec![self.sum()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.sum()?);
        }
        self.expect(Tok::RParen)?;
        if args.len() != expected {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::Arity {
                    name,
                    expected,
                    found: args.len(),
                },
            });
        }
        let mut args = args.into_iter();
        let first = args.next().expect("one argument");
        Ok(match (UnaryOp::from_name(&name), BinaryOp::from_name(&name)) {
            (Some(op), _) => Expr::unary(op, first),
            (None, Some(op)) => Expr::binary(op, first, args.next().expect("two arguments")),
            (None, None) => unreachable!("checked above"),
        })
    }
}

/// Parses `text`, accepting only the variable names in `allowed_vars`.
pub fn parse(text: &str, allowed_vars: &[&str]) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    if toks.len() == 1 {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        allowed: allowed_vars,
    };
    let expr = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(expr)
}
