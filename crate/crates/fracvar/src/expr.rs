//! Lagrangian and constraint integrands: parsing, evaluation, and symbolic
//! partial derivatives.
//!
//! The input language is deliberately small. Variables are `x`, the trajectory
//! components `y1..yN`, their combined fractional derivatives `D[y1]..D[yN]`,
//! and the multipliers `lam1..lamr`. Functions are `sin`, `cos`, `exp`, `log`,
//! `sqrt`. Binary operators are `+ - * / ^` with the usual precedence
//! (`^` highest, then unary minus, then `* /`, then `+ -`), `^` associating to
//! the right and everything else to the left. Whitespace is ignored.
//!
//! There is no simplification pass beyond constant folding in derivative
//! construction; equivalence of derivatives is a numerical contract, checked
//! against central differences in the tests.

use crate::Result;
use std::fmt;

/// A variable reference. Component and multiplier indices are 0-based here;
/// the surface syntax (`y1`, `lam1`) is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    /// Trajectory component `y<i+1>`.
    Y(usize),
    /// Combined fractional derivative of component `i`: `D[y<i+1>]`.
    Dy(usize),
    /// Isoperimetric multiplier `lam<j+1>`.
    Lam(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "x"),
            Var::Y(i) => write!(f, "y{}", i + 1),
            Var::Dy(i) => write!(f, "D[y{}]", i + 1),
            Var::Lam(j) => write!(f, "lam{}", j + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression AST.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

/// A point at which an expression is evaluated.
#[derive(Debug, Clone, Copy)]
pub struct EvalEnv<'a> {
    pub x: f64,
    pub y: &'a [f64],
    pub dy: &'a [f64],
    pub lam: &'a [f64],
}

impl<'a> EvalEnv<'a> {
    pub fn new(x: f64, y: &'a [f64], dy: &'a [f64], lam: &'a [f64]) -> Self {
        EvalEnv { x, y, dy, lam }
    }
}

/// Parse failure, carrying the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

/// Runtime evaluation failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("log of non-positive value {0}")]
    LogNonPositive(f64),
    #[error("square root of negative value {0}")]
    SqrtNegative(f64),
    #[error("power {base}^{exponent} is not a real number")]
    PowDomain { base: f64, exponent: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("expression value overflowed")]
    NonFinite,
    #[error("environment provides {got} values for {what}, expression needs index {index}")]
    Dimension {
        what: &'static str,
        index: usize,
        got: usize,
    },
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    /// Evaluate at a point. All intermediate values must stay finite.
    pub fn eval(&self, env: &EvalEnv) -> std::result::Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::X) => env.x,
            Expr::Var(Var::Y(i)) => fetch(env.y, *i, "y")?,
            Expr::Var(Var::Dy(i)) => fetch(env.dy, *i, "D[y]")?,
            Expr::Var(Var::Lam(j)) => fetch(env.lam, *j, "lam")?,
            Expr::Unary(op, c) => {
                let u = c.eval(env)?;
                match op {
                    UnaryOp::Neg => -u,
                    UnaryOp::Sin => u.sin(),
                    UnaryOp::Cos => u.cos(),
                    UnaryOp::Exp => u.exp(),
                    UnaryOp::Log => {
                        if u <= 0.0 {
                            return Err(EvalError::LogNonPositive(u));
                        }
                        u.ln()
                    }
                    UnaryOp::Sqrt => {
                        if u < 0.0 {
                            return Err(EvalError::SqrtNegative(u));
                        }
                        u.sqrt()
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval(env)?;
                let b = r.eval(env)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinaryOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(EvalError::PowDomain {
                                base: a,
                                exponent: b,
                            });
                        }
                        if a == 0.0 && b < 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a.powf(b)
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Symbolic partial derivative with respect to `var`.
    ///
    /// `^` with a non-constant exponent differentiates through the
    /// `exp(g log f)` rewrite, so its derivative is only defined where the
    /// base is positive — the same domain on which evaluation succeeds.
    pub fn partial(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
            Expr::Unary(op, c) => {
                let dc = c.partial(var);
                match op {
                    UnaryOp::Neg => neg(dc),
                    UnaryOp::Sin => mul(unary(UnaryOp::Cos, (**c).clone()), dc),
                    UnaryOp::Cos => neg(mul(unary(UnaryOp::Sin, (**c).clone()), dc)),
                    UnaryOp::Exp => mul(unary(UnaryOp::Exp, (**c).clone()), dc),
                    UnaryOp::Log => div(dc, (**c).clone()),
                    UnaryOp::Sqrt => div(
                        dc,
                        mul(Expr::Const(2.0), unary(UnaryOp::Sqrt, (**c).clone())),
                    ),
                }
            }
            Expr::Binary(op, l, r) => {
                let (l, r) = (&**l, &**r);
                let dl = l.partial(var);
                let dr = r.partial(var);
                match op {
                    BinaryOp::Add => add(dl, dr),
                    BinaryOp::Sub => sub(dl, dr),
                    BinaryOp::Mul => add(mul(dl, r.clone()), mul(l.clone(), dr)),
                    BinaryOp::Div => div(
                        sub(mul(dl, r.clone()), mul(l.clone(), dr)),
                        mul(r.clone(), r.clone()),
                    ),
                    BinaryOp::Pow => match r {
                        Expr::Const(c) => {
                            // c * l^(c-1) * l'
                            mul(
                                mul(Expr::Const(*c), pow(l.clone(), Expr::Const(c - 1.0))),
                                dl,
                            )
                        }
                        _ => {
                            // l^r * (r' log l + r l' / l)
                            mul(
                                pow(l.clone(), r.clone()),
                                add(
                                    mul(dr, unary(UnaryOp::Log, l.clone())),
                                    div(mul(r.clone(), dl), l.clone()),
                                ),
                            )
                        }
                    },
                }
            }
        }
    }

    /// Largest 1-based component index referenced through `y` or `D[y]`,
    /// 0 when none.
    pub fn max_component_index(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(Var::Y(i)) | Expr::Var(Var::Dy(i)) => i + 1,
            Expr::Var(_) => 0,
            Expr::Unary(_, c) => c.max_component_index(),
            Expr::Binary(_, l, r) => l.max_component_index().max(r.max_component_index()),
        }
    }

    /// True when the expression references any multiplier variable.
    pub fn uses_multipliers(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => matches!(v, Var::Lam(_)),
            Expr::Unary(_, c) => c.uses_multipliers(),
            Expr::Binary(_, l, r) => l.uses_multipliers() || r.uses_multipliers(),
        }
    }
}

fn fetch(slice: &[f64], index: usize, what: &'static str) -> std::result::Result<f64, EvalError> {
    slice.get(index).copied().ok_or(EvalError::Dimension {
        what,
        index,
        got: slice.len(),
    })
}

// ---------------------------------------------------------------------------
// constant-folding constructors (used by `partial`)
// ---------------------------------------------------------------------------

fn fold2(op: BinaryOp, a: f64, b: f64) -> Option<f64> {
    let v = match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b == 0.0 {
                return None;
            }
            a / b
        }
        BinaryOp::Pow => {
            if a < 0.0 && b.fract() != 0.0 {
                return None;
            }
            a.powf(b)
        }
    };
    v.is_finite().then_some(v)
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => {
            if let Some(v) = fold2(BinaryOp::Add, *x, *y) {
                return Expr::Const(v);
            }
        }
        (Expr::Const(x), _) if *x == 0.0 => return b,
        (_, Expr::Const(y)) if *y == 0.0 => return a,
        _ => {}
    }
    Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b))
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => {
            if let Some(v) = fold2(BinaryOp::Sub, *x, *y) {
                return Expr::Const(v);
            }
        }
        (_, Expr::Const(y)) if *y == 0.0 => return a,
        (Expr::Const(x), _) if *x == 0.0 => return neg(b),
        _ => {}
    }
    Expr::Binary(BinaryOp::Sub, Box::new(a), Box::new(b))
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => {
            if let Some(v) = fold2(BinaryOp::Mul, *x, *y) {
                return Expr::Const(v);
            }
        }
        (Expr::Const(x), _) => {
            if *x == 0.0 {
                return Expr::Const(0.0);
            }
            if *x == 1.0 {
                return b;
            }
        }
        (_, Expr::Const(y)) => {
            if *y == 0.0 {
                return Expr::Const(0.0);
            }
            if *y == 1.0 {
                return a;
            }
        }
        _ => {}
    }
    Expr::Binary(BinaryOp::Mul, Box::new(a), Box::new(b))
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => {
            if let Some(v) = fold2(BinaryOp::Div, *x, *y) {
                return Expr::Const(v);
            }
        }
        (_, Expr::Const(y)) if *y == 1.0 => return a,
        _ => {}
    }
    Expr::Binary(BinaryOp::Div, Box::new(a), Box::new(b))
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => {
            if let Some(v) = fold2(BinaryOp::Pow, *x, *y) {
                return Expr::Const(v);
            }
        }
        (_, Expr::Const(y)) => {
            if *y == 1.0 {
                return a;
            }
            if *y == 0.0 {
                return Expr::Const(1.0);
            }
        }
        _ => {}
    }
    Expr::Binary(BinaryOp::Pow, Box::new(a), Box::new(b))
}

pub(crate) fn neg(a: Expr) -> Expr {
    if let Expr::Const(x) = a {
        return Expr::Const(-x);
    }
    Expr::Unary(UnaryOp::Neg, Box::new(a))
}

fn unary(op: UnaryOp, a: Expr) -> Expr {
    Expr::Unary(op, Box::new(a))
}

// ---------------------------------------------------------------------------
// pretty printing
// ---------------------------------------------------------------------------

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
        Expr::Unary(UnaryOp::Neg, _) => 3,
        Expr::Binary(BinaryOp::Pow, ..) => 4,
        Expr::Const(c) if *c < 0.0 => 0, // printed parenthesized
        _ => 5,
    }
}

impl fmt::Display for Expr {
    /// Prints with the minimal parentheses that make re-parsing reproduce
    /// the same tree (same-precedence right operands of left-associative
    /// operators are parenthesized, the base of `^` must be an atom).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, needs_parens: bool) -> fmt::Result {
            if needs_parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Unary(UnaryOp::Neg, c) => {
                write!(f, "-")?;
                child(f, c, prec(c) < 3)
            }
            Expr::Unary(op, c) => {
                let name = match op {
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Exp => "exp",
                    UnaryOp::Log => "log",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}({c})")
            }
            Expr::Binary(op, l, r) => {
                let p = prec(self);
                match op {
                    BinaryOp::Pow => {
                        child(f, l, prec(l) < 5)?;
                        write!(f, "^")?;
                        child(f, r, prec(r) < 3)
                    }
                    _ => {
                        let sym = match op {
                            BinaryOp::Add => " + ",
                            BinaryOp::Sub => " - ",
                            BinaryOp::Mul => "*",
                            BinaryOp::Div => "/",
                            BinaryOp::Pow => unreachable!(),
                        };
                        child(f, l, prec(l) < p)?;
                        write!(f, "{sym}")?;
                        child(f, r, prec(r) <= p)
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// lexer + parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Var(Var),
    Func(UnaryOp),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
    n_components: usize,
    n_multipliers: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            offset,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> std::result::Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let c = self.bytes[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                }
                b'+' => {
                    self.pos += 1;
                    out.push((start, Tok::Plus));
                }
                b'-' => {
                    self.pos += 1;
                    out.push((start, Tok::Minus));
                }
                b'*' => {
                    self.pos += 1;
                    out.push((start, Tok::Star));
                }
                b'/' => {
                    self.pos += 1;
                    out.push((start, Tok::Slash));
                }
                b'^' => {
                    self.pos += 1;
                    out.push((start, Tok::Caret));
                }
                b'(' => {
                    self.pos += 1;
                    out.push((start, Tok::LParen));
                }
                b')' => {
                    self.pos += 1;
                    out.push((start, Tok::RParen));
                }
                b'0'..=b'9' => out.push((start, self.number()?)),
                b'.' => return Err(self.err(start, "number must start with a digit")),
                c if c.is_ascii_alphabetic() => out.push((start, self.ident()?)),
                c => {
                    return Err(self.err(start, format!("unexpected character `{}`", c as char)))
                }
            }
        }
        Ok(out)
    }

    fn number(&mut self) -> std::result::Result<Tok, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
            self.pos += 1;
            if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_digit() {
                return Err(self.err(self.pos, "expected digits after decimal point"));
            }
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'e' | b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_digit() {
                return Err(self.err(mark, "malformed exponent"));
            }
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let value: f64 = text
            .parse()
            .map_err(|_| self.err(start, format!("invalid number `{text}`")))?;
        Ok(Tok::Num(value))
    }

    fn ident(&mut self) -> std::result::Result<Tok, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match name {
            "x" => Ok(Tok::Var(Var::X)),
            "sin" => Ok(Tok::Func(UnaryOp::Sin)),
            "cos" => Ok(Tok::Func(UnaryOp::Cos)),
            "exp" => Ok(Tok::Func(UnaryOp::Exp)),
            "log" => Ok(Tok::Func(UnaryOp::Log)),
            "sqrt" => Ok(Tok::Func(UnaryOp::Sqrt)),
            "D" => {
                if self.pos >= self.bytes.len() || self.bytes[self.pos] != b'[' {
                    return Err(self.err(start, "expected `[` after `D`"));
                }
                self.pos += 1;
                let inner_start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b']' {
                    self.pos += 1;
                }
                if self.pos >= self.bytes.len() {
                    return Err(self.err(start, "unterminated `D[...]`"));
                }
                let inner =
                    std::str::from_utf8(&self.bytes[inner_start..self.pos]).unwrap();
                self.pos += 1; // consume ']'
                let idx = self.component_index(inner, inner_start)?;
                Ok(Tok::Var(Var::Dy(idx)))
            }
            _ => {
                if let Some(rest) = name.strip_prefix("lam") {
                    let j = self.one_based(rest, start, "multiplier")?;
                    if j > self.n_multipliers {
                        return Err(self.err(
                            start,
                            format!(
                                "multiplier index {} out of declared range 1..={}",
                                j, self.n_multipliers
                            ),
                        ));
                    }
                    return Ok(Tok::Var(Var::Lam(j - 1)));
                }
                if let Some(rest) = name.strip_prefix('y') {
                    if rest.bytes().all(|b| b.is_ascii_digit()) && !rest.is_empty() {
                        let idx = self.component_index(name, start)?;
                        return Ok(Tok::Var(Var::Y(idx)));
                    }
                }
                Err(self.err(start, format!("unknown identifier `{name}`")))
            }
        }
    }

    /// Parses `y<i>` and range-checks against the declared component count.
    fn component_index(
        &self,
        text: &str,
        offset: usize,
    ) -> std::result::Result<usize, ParseError> {
        let digits = text
            .strip_prefix('y')
            .ok_or_else(|| self.err(offset, format!("expected component `y<i>`, got `{text}`")))?;
        let i = self.one_based(digits, offset, "component")?;
        if i > self.n_components {
            return Err(self.err(
                offset,
                format!(
                    "component index {} out of declared range 1..={}",
                    i, self.n_components
                ),
            ));
        }
        Ok(i - 1)
    }

    fn one_based(
        &self,
        digits: &str,
        offset: usize,
        what: &str,
    ) -> std::result::Result<usize, ParseError> {
        let v: usize = digits
            .parse()
            .map_err(|_| self.err(offset, format!("malformed {what} index `{digits}`")))?;
        if v == 0 {
            return Err(self.err(offset, format!("{what} indices are 1-based")));
        }
        Ok(v)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        self.pos += 1;
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Binary(BinaryOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Binary(BinaryOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Binary(BinaryOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Binary(BinaryOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> std::result::Result<Expr, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<Expr, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let exponent = self.unary()?; // right-associative, `-` allowed after `^`
            return Ok(Expr::Binary(
                BinaryOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> std::result::Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.err("unexpected end of expression")),
            Some(Tok::Num(_)) => {
                if let Tok::Num(v) = self.bump() {
                    Ok(Expr::Const(v))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::Var(_)) => {
                if let Tok::Var(v) = self.bump() {
                    Ok(Expr::Var(v))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::Func(_)) => {
                let op = if let Tok::Func(op) = self.bump() {
                    op
                } else {
                    unreachable!()
                };
                if !matches!(self.peek(), Some(Tok::LParen)) {
                    return Err(self.err("expected `(` after function name"));
                }
                self.bump();
                let arg = self.expr()?;
                if !matches!(self.peek(), Some(Tok::RParen)) {
                    return Err(self.err("expected `)`"));
                }
                self.bump();
                Ok(Expr::Unary(op, Box::new(arg)))
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                if !matches!(self.peek(), Some(Tok::RParen)) {
                    return Err(self.err("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Some(t) => Err(self.err(format!("unexpected token {t:?}"))),
        }
    }
}

/// Parse an expression with `n_components` trajectory components and
/// `n_multipliers` multipliers in scope.
pub fn parse(
    text: &str,
    n_components: usize,
    n_multipliers: usize,
) -> std::result::Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let toks = Lexer {
        bytes: text.as_bytes(),
        pos: 0,
        n_components,
        n_multipliers,
    }
    .tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input after expression"));
    }
    Ok(e)
}

/// Parse an expression of `x` alone (no components, no multipliers).
pub fn parse_univariate(text: &str) -> Result<Expr> {
    Ok(parse(text, 0, 0)?)
}
