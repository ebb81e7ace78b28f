//! Scalar expressions in the configuration variable `y`.
//!
//! Expressions are parsed from text (see [`parse`]), evaluated together with
//! their first two derivatives through [`Jet2`], printed back in a fully
//! parenthesized canonical form, and differentiated symbolically when a
//! caller needs a third derivative of a system function.
//!
//! Grammar (EBNF, whitespace ignored):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;             (* right associative *)
//! primary = number | "y" | "x" | "pi" | "$" ident
//!         | func "(" expr ")" | "(" expr ")" ;
//! func    = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! A minus sign written directly in front of a number literal (and not
//! followed by `^`) folds into a negative constant. The exponent of `^` must
//! not depend on `x` or `y`. `x` is only meaningful for plain evaluation via
//! [`Expr::eval_xy`]; the jet evaluator rejects it.

mod jet;
mod parse;

use std::fmt;

pub use jet::Jet2;
pub use parse::{parse, parse_with, ParseError};

use crate::error::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl UnaryOp {
    pub const FUNCTIONS: [UnaryOp; 6] = [
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Tan,
        UnaryOp::Exp,
        UnaryOp::Log,
        UnaryOp::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::FUNCTIONS.iter().copied().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Expression tree. Parameters are substituted at parse time, so a tree only
/// holds constants, the variables, and operators.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn y() -> Self {
        Expr::Var(Var::Y)
    }

    pub fn x() -> Self {
        Expr::Var(Var::X)
    }

    pub fn constant(c: f64) -> Self {
        Expr::Const(c)
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Self {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn sin(self) -> Self {
        Self::unary(UnaryOp::Sin, self)
    }

    pub fn cos(self) -> Self {
        Self::unary(UnaryOp::Cos, self)
    }

    pub fn exp(self) -> Self {
        Self::unary(UnaryOp::Exp, self)
    }

    pub fn powc(self, p: f64) -> Self {
        Self::binary(BinaryOp::Pow, self, Expr::Const(p))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Unary(_, e) => e.depends_on(v),
            Expr::Binary(_, l, r) => l.depends_on(v) || r.depends_on(v),
        }
    }

    pub fn is_constant(&self) -> bool {
        !self.depends_on(Var::X) && !self.depends_on(Var::Y)
    }

    /// Value with first and second derivative in `y`.
    pub fn eval2(&self, y: f64) -> Result<Jet2, EvalError> {
        self.jet(None, y)
    }

    /// Like [`Expr::eval2`] but with `x` bound to a constant.
    pub fn eval2_xy(&self, x: f64, y: f64) -> Result<Jet2, EvalError> {
        self.jet(Some(x), y)
    }

    pub fn eval(&self, y: f64) -> Result<f64, EvalError> {
        self.eval2(y).map(|j| j.value)
    }

    pub fn eval_xy(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        self.eval2_xy(x, y).map(|j| j.value)
    }

    fn jet(&self, x: Option<f64>, y: f64) -> Result<Jet2, EvalError> {
        let out = match self {
            Expr::Const(c) => Jet2::constant(*c),
            Expr::Var(Var::Y) => Jet2::variable(y),
            Expr::Var(Var::X) => match x {
                Some(x) => Jet2::constant(x),
                None => return Err(EvalError::UnboundX),
            },
            Expr::Unary(op, e) => {
                let a = e.jet(x, y)?;
                let v = a.value;
                let domain = |what: &'static str| EvalError::Domain { op: what, y };
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Tan => {
                        if v.cos() == 0.0 {
                            return Err(domain("tan"));
                        }
                        a.tan()
                    }
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Log => {
                        if v <= 0.0 {
                            return Err(domain("log"));
                        }
                        a.ln()
                    }
                    UnaryOp::Sqrt => {
                        if v <= 0.0 {
                            return Err(domain("sqrt"));
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.jet(x, y)?;
                match op {
                    BinaryOp::Pow => {
                        let p = r.jet(x, y)?.value;
                        let base = a.value;
                        let integral = p.fract() == 0.0;
                        if (!integral && base <= 0.0) || (p < 0.0 && base == 0.0) {
                            return Err(EvalError::Domain { op: "^", y });
                        }
                        a.powf(p)
                    }
                    _ => {
                        let b = r.jet(x, y)?;
                        match op {
                            BinaryOp::Add => a + b,
                            BinaryOp::Sub => a - b,
                            BinaryOp::Mul => a * b,
                            BinaryOp::Div => {
                                if b.value == 0.0 {
                                    return Err(EvalError::Domain { op: "/", y });
                                }
                                a / b
                            }
                            BinaryOp::Pow => unreachable!(),
                        }
                    }
                }
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(EvalError::NonFinite { y })
        }
    }

    /// Symbolic derivative with respect to `y`. Only trivial zero/one folding
    /// is performed; the result is not simplified further.
    pub fn derivative(&self) -> Expr {
        use BinaryOp::*;
        match self {
            Expr::Const(_) | Expr::Var(Var::X) => Expr::Const(0.0),
            Expr::Var(Var::Y) => Expr::Const(1.0),
            Expr::Unary(op, e) => {
                let du = e.derivative();
                if du.as_const() == Some(0.0) {
                    return Expr::Const(0.0);
                }
                let u = (**e).clone();
                let outer = match op {
                    UnaryOp::Neg => return neg(du),
                    UnaryOp::Sin => u.cos(),
                    UnaryOp::Cos => neg(u.sin()),
                    UnaryOp::Tan => div(Expr::Const(1.0), u.cos().powc(2.0)),
                    UnaryOp::Exp => u.exp(),
                    UnaryOp::Log => div(Expr::Const(1.0), u),
                    UnaryOp::Sqrt => div(Expr::Const(0.5), Expr::unary(UnaryOp::Sqrt, u)),
                };
                mul(outer, du)
            }
            Expr::Binary(op, l, r) => {
                let (u, v) = ((**l).clone(), (**r).clone());
                match op {
                    Add => add(l.derivative(), r.derivative()),
                    Sub => sub(l.derivative(), r.derivative()),
                    Mul => add(mul(l.derivative(), v), mul(u, r.derivative())),
                    Div => {
                        let num = sub(mul(l.derivative(), v.clone()), mul(u, r.derivative()));
                        div(num, v.powc(2.0))
                    }
                    Pow => {
                        // exponent is y-free; reduce it to a number
                        let p = r.eval_xy(0.0, 0.0).unwrap_or(f64::NAN);
                        let du = l.derivative();
                        if du.as_const() == Some(0.0) {
                            return Expr::Const(0.0);
                        }
                        let lowered = if p - 1.0 == 1.0 { u } else { u.powc(p - 1.0) };
                        mul(mul(Expr::Const(p), lowered), du)
                    }
                }
            }
        }
    }
}

fn is_zero(e: &Expr) -> bool {
    e.as_const() == Some(0.0)
}

fn is_one(e: &Expr) -> bool {
    e.as_const() == Some(1.0)
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::binary(BinaryOp::Add, a, b)
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        neg(b)
    } else {
        Expr::binary(BinaryOp::Sub, a, b)
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::Const(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::binary(BinaryOp::Mul, a, b)
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        Expr::Const(0.0)
    } else if is_one(&b) {
        a
    } else {
        Expr::binary(BinaryOp::Div, a, b)
    }
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(0.0) => Expr::Const(0.0),
        Expr::Unary(UnaryOp::Neg, inner) => *inner,
        other => Expr::unary(UnaryOp::Neg, other),
    }
}

impl fmt::Display for Expr {
    /// Canonical, fully parenthesized text; parsing it back yields the same
    /// tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{}", c)
                }
            }
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Unary(UnaryOp::Neg, e) => match **e {
                // keep "-<literal>" from folding into a negative constant
                Expr::Const(c) if !c.is_sign_negative() => write!(f, "(-({}))", e),
                _ => write!(f, "(-{})", e),
            },
            Expr::Unary(op, e) => write!(f, "{}({})", op.name(), e),
            Expr::Binary(op, l, r) => write!(f, "({}{}{})", l, op.symbol(), r),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
