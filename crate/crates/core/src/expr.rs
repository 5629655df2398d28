//! Real-valued expressions over `x` (and optionally `y`).
//!
//! Grammar:
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := factor (("*" | "/") factor)*
//! factor  := unary ("^" factor)?            right associative
//! unary   := "-" unary | primary
//! primary := NUMBER | VAR | IDENT "(" args ")" | "(" expr ")"
//! ```
//!
//! Functions: `abs/1`, `sqrt/1`, `min/2`, `max/2`, `pow/2` and
//! `if(a RELOP b, then, else)` with `RELOP` one of `<`, `<=`, `>`, `>=`.
//! Note that unary minus binds tighter than `^`, so `-x^2` is `(-x)^2`.
//!
//! The [`Display`](fmt::Display) impl prints a canonical form that parses
//! back to an identical tree.

use std::fmt;

use crate::error::EvalError;
use crate::format::fmt_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Min,
    Max,
    Pow,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "min" => Func::Min,
            "max" => Func::Max,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
            Func::Pow => "pow",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Abs | Func::Sqrt => 1,
            Func::Min | Func::Max | Func::Pow => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    If {
        op: RelOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected {}, found {found}", expected.join(" or "))]
    Unexpected {
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("variable `{0}` is not allowed in a one-variable expression")]
    VariableNotAllowed(String),
    #[error("`{name}` takes {expected} argument(s), got {found}")]
    WrongArgCount {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("number literal `{0}` is not a finite real")]
    BadNumber(String),
    #[error("empty expression")]
    Empty,
}

/// Parse failure; `offset` is the 1-based byte position of the offending token.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn expected(&self) -> &[&'static str] {
        match &self.kind {
            ParseErrorKind::Unexpected { expected, .. } => expected,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Rel(RelOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {}", fmt_real(*v)),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Rel(op) => format!("`{}`", relop_str(*op)),
            Tok::Eof => "end of input".into(),
        }
    }
}

const PRIMARY: &[&str] = &["number", "variable", "function call", "`(`", "`-`"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let at = i + 1;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
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
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError {
                offset: at,
                kind: ParseErrorKind::BadNumber(text.into()),
            })?;
            if !v.is_finite() {
                return Err(ParseError {
                    offset: at,
                    kind: ParseErrorKind::BadNumber(text.into()),
                });
            }
            out.push((Tok::Num(v), at));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), at));
            continue;
        }
        let next_is_eq = bytes.get(i + 1) == Some(&b'=');
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'<' if next_is_eq => Tok::Rel(RelOp::Le),
            b'>' if next_is_eq => Tok::Rel(RelOp::Ge),
            b'<' => Tok::Rel(RelOp::Lt),
            b'>' => Tok::Rel(RelOp::Gt),
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: at,
                    kind: ParseErrorKind::Unexpected {
                        expected: vec!["a token"],
                        found: format!("character `{ch}`"),
                    },
                });
            }
        };
        i += if matches!(tok, Tok::Rel(RelOp::Le | RelOp::Ge)) {
            2
        } else {
            1
        };
        out.push((tok, at));
    }
    out.push((Tok::Eof, src.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    arity: Arity,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_vec(),
                found: self.peek().describe(),
            },
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.factor()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "x" => return Ok(Expr::Var(Var::X)),
                    "y" if self.arity == Arity::Two => return Ok(Expr::Var(Var::Y)),
                    "y" => {
                        return Err(ParseError {
                            offset: at,
                            kind: ParseErrorKind::VariableNotAllowed(name),
                        })
                    }
                    _ => {}
                }
                if name == "if" {
                    return self.conditional(at);
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownIdentifier(name),
                    });
                };
                self.expect(Tok::LParen, "`(`")?;
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                if args.len() != func.arity() {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::WrongArgCount {
                            name,
                            expected: func.arity(),
                            found: args.len(),
                        },
                    });
                }
                Ok(Expr::Call(func, args))
            }
            _ => Err(self.unexpected(PRIMARY)),
        }
    }

    fn conditional(&mut self, _at: usize) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let lhs = self.expr()?;
        let op = match self.peek() {
            Tok::Rel(op) => *op,
            _ => return Err(self.unexpected(&["`<`", "`<=`", "`>`", "`>=`"])),
        };
        self.bump();
        let rhs = self.expr()?;
        self.expect(Tok::Comma, "`,`")?;
        let then = self.expr()?;
        self.expect(Tok::Comma, "`,`")?;
        let otherwise = self.expr()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Expr::If {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        })
    }
}

/// Parses `src` in a one- or two-variable context.
pub fn parse(src: &str, arity: Arity) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError {
            offset: 1,
            kind: ParseErrorKind::Empty,
        });
    }
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        arity,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}

impl Expr {
    /// Strict binary64 evaluation. `y` must be supplied for two-variable
    /// expressions.
    pub fn eval(&self, x: f64, y: Option<f64>) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => return Ok(*v),
            Expr::Var(Var::X) => return Ok(x),
            Expr::Var(Var::Y) => return y.ok_or(EvalError::UnboundVariable),
            Expr::Neg(e) => -e.eval(x, y)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval(x, y)?;
                let b = b.eval(x, y)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => self.div(a, b)?,
                    BinOp::Pow => self.pow(a, b)?,
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(x, y)?;
                match func {
                    Func::Abs => a.abs(),
                    Func::Sqrt => a.sqrt(),
                    Func::Min => a.min(args[1].eval(x, y)?),
                    Func::Max => a.max(args[1].eval(x, y)?),
                    Func::Pow => self.pow(a, args[1].eval(x, y)?)?,
                }
            }
            Expr::If {
                op,
                lhs,
                rhs,
                then,
                otherwise,
            } => {
                let l = lhs.eval(x, y)?;
                let r = rhs.eval(x, y)?;
                let take = match op {
                    RelOp::Lt => l < r,
                    RelOp::Le => l <= r,
                    RelOp::Gt => l > r,
                    RelOp::Ge => l >= r,
                };
                return if take {
                    then.eval(x, y)
                } else {
                    otherwise.eval(x, y)
                };
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                node: self.to_string(),
            })
        }
    }

    fn div(&self, a: f64, b: f64) -> Result<f64, EvalError> {
        if b == 0.0 {
            return Err(EvalError::DivisionByZero {
                node: self.to_string(),
            });
        }
        Ok(a / b)
    }

    fn pow(&self, a: f64, b: f64) -> Result<f64, EvalError> {
        if a < 0.0 && b.fract() != 0.0 {
            return Err(EvalError::ComplexPower {
                node: self.to_string(),
            });
        }
        Ok(a.powf(b))
    }

    /// True when the tree mentions `y`.
    pub fn uses_y(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(Var::X) => false,
            Expr::Var(Var::Y) => true,
            Expr::Neg(e) => e.uses_y(),
            Expr::Binary(_, a, b) => a.uses_y() || b.uses_y(),
            Expr::Call(_, args) => args.iter().any(Expr::uses_y),
            Expr::If {
                lhs,
                rhs,
                then,
                otherwise,
                ..
            } => lhs.uses_y() || rhs.uses_y() || then.uses_y() || otherwise.uses_y(),
        }
    }
}

fn relop_str(op: RelOp) -> &'static str {
    match op {
        RelOp::Lt => "<",
        RelOp::Le => "<=",
        RelOp::Gt => ">",
        RelOp::Ge => ">=",
    }
}

// Precedence levels used by the printer: sum < product < unary < power < atom.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Binary(BinOp::Pow, ..) => 3,
        Expr::Neg(_) => 4,
        _ => 5,
    }
}

struct Wrap<'a>(&'a Expr, bool);

impl fmt::Display for Wrap<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => f.write_str(&fmt_real(*v)),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Neg(e) => write!(f, "-{}", Wrap(e, level(e) < 4)),
            Expr::Binary(op, a, b) => {
                let (sym, lvl) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Mul => (" * ", 2),
                    BinOp::Div => (" / ", 2),
                    BinOp::Pow => ("^", 3),
                };
                if *op == BinOp::Pow {
                    // base must be a unary, exponent a factor
                    write!(f, "{}{sym}{}", Wrap(a, level(a) < 4), Wrap(b, level(b) < 3))
                } else {
                    write!(
                        f,
                        "{}{sym}{}",
                        Wrap(a, level(a) < lvl),
                        Wrap(b, level(b) <= lvl)
                    )
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::If {
                op,
                lhs,
                rhs,
                then,
                otherwise,
            } => write!(f, "if({lhs} {} {rhs}, {then}, {otherwise})", relop_str(*op)),
        }
    }
}
