//! Expressions `y(x)` with second-order forward-mode differentiation.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number | 'x' | name | ('sqrt' | 'abs') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Power binds tighter than unary minus, so `-x^2` is `-(x^2)`. Exponents may
//! use named parameters but must not depend on `x`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, ParseError, Result};

/// Values for the named parameters of an expression.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Const(f64),
    Var,
    Param(String),
    Neg(Box<ExprNode>),
    Add(Box<ExprNode>, Box<ExprNode>),
    Sub(Box<ExprNode>, Box<ExprNode>),
    Mul(Box<ExprNode>, Box<ExprNode>),
    Div(Box<ExprNode>, Box<ExprNode>),
    Pow(Box<ExprNode>, Box<ExprNode>),
    Sqrt(Box<ExprNode>),
    Abs(Box<ExprNode>),
}

/// Value with first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Jet2 {
        Jet2 { value, d1, d2 }
    }

    pub const fn constant(value: f64) -> Jet2 {
        Jet2::new(value, 0.0, 0.0)
    }

    pub const fn variable(x: f64) -> Jet2 {
        Jet2::new(x, 1.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }

    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)
    }

    fn neg(self) -> Jet2 {
        Jet2::new(-self.value, -self.d1, -self.d2)
    }

    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )
    }

    fn recip(self) -> Jet2 {
        let v = self.value;
        let inv = 1.0 / v;
        let inv2 = inv * inv;
        Jet2::new(
            inv,
            -self.d1 * inv2,
            2.0 * self.d1 * self.d1 * inv2 * inv - self.d2 * inv2,
        )
    }

    /// Chain rule for an outer function with value `g`, `g'`, `g''` at `self.value`.
    fn compose(self, g: f64, g1: f64, g2: f64) -> Jet2 {
        Jet2::new(g, g1 * self.d1, g2 * self.d1 * self.d1 + g1 * self.d2)
    }
}

pub fn parse_expression(src: &str) -> Result<ExprNode, ParseError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        src_len: src.len(),
    };
    let node = parser.expr()?;
    match parser.peek() {
        None => Ok(node),
        Some(t) => Err(ParseError {
            offset: t.offset,
            message: format!("unexpected {}", t.kind.describe()),
        }),
    }
}

/// Value and first two derivatives at `x`. Fails when any of them is not finite.
pub fn eval_jet2(e: &ExprNode, x: f64, params: &Params) -> Result<Jet2> {
    let jet = eval_jet2_raw(e, x, params)?;
    if !jet.is_finite() {
        return Err(Error::Domain(format!(
            "`{e}` has an unbounded derivative at x = {x}"
        )));
    }
    Ok(jet)
}

/// Like [`eval_jet2`], but lets infinite derivatives through. Used for
/// one-sided tangent directions at arc endpoints with vertical tangents.
pub fn eval_jet2_raw(e: &ExprNode, x: f64, params: &Params) -> Result<Jet2> {
    use ExprNode::*;
    Ok(match e {
        Const(c) => Jet2::constant(*c),
        Var => Jet2::variable(x),
        Param(name) => Jet2::constant(lookup(name, params)?),
        Neg(a) => eval_jet2_raw(a, x, params)?.neg(),
        Add(a, b) => eval_jet2_raw(a, x, params)?.add(eval_jet2_raw(b, x, params)?),
        Sub(a, b) => eval_jet2_raw(a, x, params)?.sub(eval_jet2_raw(b, x, params)?),
        Mul(a, b) => eval_jet2_raw(a, x, params)?.mul(eval_jet2_raw(b, x, params)?),
        Div(a, b) => {
            let den = eval_jet2_raw(b, x, params)?;
            if den.value == 0.0 {
                return Err(Error::Domain(format!("division by zero in `{e}` at x = {x}")));
            }
            eval_jet2_raw(a, x, params)?.mul(den.recip())
        }
        Pow(base, exp) => {
            let k = eval_value(exp, x, params)?;
            let u = eval_jet2_raw(base, x, params)?;
            pow_jet(u, k).ok_or_else(|| {
                Error::Domain(format!("`{e}` is undefined at x = {x} (base {})", u.value))
            })?
        }
        Sqrt(a) => {
            let u = eval_jet2_raw(a, x, params)?;
            if u.value < 0.0 {
                return Err(Error::Domain(format!(
                    "sqrt of negative value {} at x = {x}",
                    u.value
                )));
            }
            pow_jet(u, 0.5).expect("nonnegative base")
        }
        Abs(a) => {
            let u = eval_jet2_raw(a, x, params)?;
            if u.value == 0.0 {
                return Err(Error::NonDifferentiable(format!("`{e}` at x = {x}")));
            }
            if u.value < 0.0 {
                u.neg()
            } else {
                u
            }
        }
    })
}

/// Value only; defined wherever the expression is, including points where
/// derivatives blow up.
pub fn eval_value(e: &ExprNode, x: f64, params: &Params) -> Result<f64> {
    use ExprNode::*;
    Ok(match e {
        Const(c) => *c,
        Var => x,
        Param(name) => lookup(name, params)?,
        Neg(a) => -eval_value(a, x, params)?,
        Add(a, b) => eval_value(a, x, params)? + eval_value(b, x, params)?,
        Sub(a, b) => eval_value(a, x, params)? - eval_value(b, x, params)?,
        Mul(a, b) => eval_value(a, x, params)? * eval_value(b, x, params)?,
        Div(a, b) => {
            let den = eval_value(b, x, params)?;
            if den == 0.0 {
                return Err(Error::Domain(format!("division by zero in `{e}` at x = {x}")));
            }
            eval_value(a, x, params)? / den
        }
        Pow(base, exp) => {
            let k = eval_value(exp, x, params)?;
            let u = eval_value(base, x, params)?;
            pow_value(u, k).ok_or_else(|| {
                Error::Domain(format!("`{e}` is undefined at x = {x} (base {u})"))
            })?
        }
        Sqrt(a) => {
            let u = eval_value(a, x, params)?;
            if u < 0.0 {
                return Err(Error::Domain(format!("sqrt of negative value {u} at x = {x}")));
            }
            u.sqrt()
        }
        Abs(a) => eval_value(a, x, params)?.abs(),
    })
}

fn lookup(name: &str, params: &Params) -> Result<f64> {
    params
        .get(name)
        .copied()
        .ok_or_else(|| Error::UnboundParameter(name.to_string()))
}

fn as_integer(k: f64) -> Option<i32> {
    (k.fract() == 0.0 && k.abs() < i32::MAX as f64).then_some(k as i32)
}

fn pow_value(u: f64, k: f64) -> Option<f64> {
    match as_integer(k) {
        Some(n) if u == 0.0 && n < 0 => None,
        Some(n) => Some(u.powi(n)),
        None if u < 0.0 || (u == 0.0 && k < 0.0) => None,
        None => Some(u.powf(k)),
    }
}

fn pow_jet(u: Jet2, k: f64) -> Option<Jet2> {
    let v = u.value;
    let (g, g1, g2) = match as_integer(k) {
        Some(0) => (1.0, 0.0, 0.0),
        Some(1) => (v, 1.0, 0.0),
        Some(n) => {
            if v == 0.0 && n < 0 {
                return None;
            }
            let nf = n as f64;
            (v.powi(n), nf * v.powi(n - 1), nf * (nf - 1.0) * v.powi(n - 2))
        }
        None => {
            if v < 0.0 || (v == 0.0 && k < 0.0) {
                return None;
            }
            (v.powf(k), k * v.powf(k - 1.0), k * (k - 1.0) * v.powf(k - 2.0))
        }
    };
    Some(u.compose(g, g1, g2))
}

impl ExprNode {
    pub fn depends_on_x(&self) -> bool {
        use ExprNode::*;
        match self {
            Const(_) | Param(_) => false,
            Var => true,
            Neg(a) | Sqrt(a) | Abs(a) => a.depends_on_x(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                a.depends_on_x() || b.depends_on_x()
            }
        }
    }

    /// Names of all parameters referenced by the expression.
    pub fn param_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        use ExprNode::*;
        match self {
            Const(_) | Var => {}
            Param(p) => {
                out.insert(p.clone());
            }
            Neg(a) | Sqrt(a) | Abs(a) => a.collect_params(out),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    /// Replaces every occurrence of `x` with `replacement`.
    pub fn substitute_x(&self, replacement: &ExprNode) -> ExprNode {
        use ExprNode::*;
        let sub = |a: &ExprNode| Box::new(a.substitute_x(replacement));
        match self {
            Var => replacement.clone(),
            Const(_) | Param(_) => self.clone(),
            Neg(a) => Neg(sub(a)),
            Sqrt(a) => Sqrt(sub(a)),
            Abs(a) => Abs(sub(a)),
            Add(a, b) => Add(sub(a), sub(b)),
            Sub(a, b) => Sub(sub(a), sub(b)),
            Mul(a, b) => Mul(sub(a), sub(b)),
            Div(a, b) => Div(sub(a), sub(b)),
            Pow(a, b) => Pow(sub(a), sub(b)),
        }
    }

    fn precedence(&self) -> u8 {
        use ExprNode::*;
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Pow(..) => 4,
            Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ExprNode::*;
        // Operand printed with parentheses when it binds looser than `min`.
        let operand = |f: &mut fmt::Formatter<'_>, e: &ExprNode, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Const(c) => write!(f, "{c}"),
            Var => f.write_str("x"),
            Param(p) => f.write_str(p),
            Neg(a) => {
                f.write_str("-")?;
                operand(f, a, 4)
            }
            Add(a, b) => {
                operand(f, a, 1)?;
                f.write_str(" + ")?;
                operand(f, b, 2)
            }
            Sub(a, b) => {
                operand(f, a, 1)?;
                f.write_str(" - ")?;
                operand(f, b, 2)
            }
            Mul(a, b) => {
                operand(f, a, 2)?;
                f.write_str("*")?;
                operand(f, b, 4)
            }
            Div(a, b) => {
                operand(f, a, 2)?;
                f.write_str("/")?;
                operand(f, b, 4)
            }
            Pow(a, b) => {
                operand(f, a, 5)?;
                f.write_str("^")?;
                operand(f, b, 4)
            }
            Sqrt(a) => write!(f, "sqrt({a})"),
            Abs(a) => write!(f, "abs({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Num(n) => format!("number {n}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(TokenKind::Plus),
            b'-' => Some(TokenKind::Minus),
            b'*' => Some(TokenKind::Star),
            b'/' => Some(TokenKind::Slash),
            b'^' => Some(TokenKind::Caret),
            b'(' => Some(TokenKind::LParen),
            b')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token { kind, offset: start });
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
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
            let value: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            if !value.is_finite() {
                return Err(ParseError {
                    offset: start,
                    message: format!("number `{text}` is out of range"),
                });
            }
            out.push(Token {
                kind: TokenKind::Num(value),
                offset: start,
            });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: TokenKind::Ident(src[start..i].to_string()),
                offset: start,
            });
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: start,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    src_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.src_len, |t| t.offset)
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_string(), |t| t.kind.describe());
        ParseError {
            offset: self.offset(),
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> Result<(), ParseError> {
        if self.peek_kind() == Some(&kind) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek_kind() {
                Some(TokenKind::Plus) => {
                    self.pos += 1;
                    lhs = ExprNode::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(TokenKind::Minus) => {
                    self.pos += 1;
                    lhs = ExprNode::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek_kind() {
                Some(TokenKind::Star) => {
                    self.pos += 1;
                    lhs = ExprNode::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(TokenKind::Slash) => {
                    self.pos += 1;
                    lhs = ExprNode::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ExprNode, ParseError> {
        match self.peek_kind() {
            Some(TokenKind::Minus) => {
                self.pos += 1;
                Ok(ExprNode::Neg(Box::new(self.unary()?)))
            }
            Some(TokenKind::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ExprNode, ParseError> {
        let base = self.primary()?;
        if self.peek_kind() == Some(&TokenKind::Caret) {
            self.pos += 1;
            let exp_offset = self.offset();
            let exp = self.unary()?;
            if exp.depends_on_x() {
                return Err(ParseError {
                    offset: exp_offset,
                    message: "exponent must not depend on x".into(),
                });
            }
            return Ok(ExprNode::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ExprNode, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("an expression"));
        };
        match tok.kind {
            TokenKind::Num(v) => {
                self.pos += 1;
                Ok(ExprNode::Const(v))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                let is_call = self.peek_kind() == Some(&TokenKind::LParen);
                match (name.as_str(), is_call) {
                    ("sqrt" | "abs", true) => {
                        self.pos += 1;
                        let arg = Box::new(self.expr()?);
                        self.expect(TokenKind::RParen, "`)`")?;
                        Ok(if name == "sqrt" {
                            ExprNode::Sqrt(arg)
                        } else {
                            ExprNode::Abs(arg)
                        })
                    }
                    ("sqrt" | "abs", false) => Err(ParseError {
                        offset: self.offset(),
                        message: format!("expected `(` after `{name}`"),
                    }),
                    (_, true) => Err(ParseError {
                        offset: tok.offset,
                        message: format!("unknown function `{name}`"),
                    }),
                    ("x", false) => Ok(ExprNode::Var),
                    (_, false) => Ok(ExprNode::Param(name)),
                }
            }
            _ => Err(self.error("an expression")),
        }
    }
}
