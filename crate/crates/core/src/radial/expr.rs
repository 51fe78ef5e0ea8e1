//! Radial expressions over log-polynomial leaves.
//!
//! Quotients stay unevaluated; callers that need a sign usually clear
//! denominators first and only use the tree for interval bounds.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

use super::{int, LogPolynomial, RadialError};
use crate::interval::{Enclose, Interval};
use crate::radial::logpoly::CompiledPoly;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprTree {
    Poly(LogPolynomial),
    Sum(Vec<ExprTree>),
    Product(Vec<ExprTree>),
    Quotient(Box<ExprTree>, Box<ExprTree>),
    Exp(Box<ExprTree>),
    Neg(Box<ExprTree>),
    Powi(Box<ExprTree>, i32),
}

impl From<LogPolynomial> for ExprTree {
    fn from(p: LogPolynomial) -> Self {
        ExprTree::Poly(p)
    }
}

impl ExprTree {
    pub fn constant(c: BigRational) -> ExprTree {
        ExprTree::Poly(LogPolynomial::constant(c))
    }

    pub fn sum(items: Vec<ExprTree>) -> ExprTree {
        ExprTree::Sum(items)
    }

    pub fn product(items: Vec<ExprTree>) -> ExprTree {
        ExprTree::Product(items)
    }

    pub fn quotient(num: ExprTree, den: ExprTree) -> ExprTree {
        ExprTree::Quotient(Box::new(num), Box::new(den))
    }

    pub fn exp(arg: ExprTree) -> ExprTree {
        ExprTree::Exp(Box::new(arg))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(arg: ExprTree) -> ExprTree {
        ExprTree::Neg(Box::new(arg))
    }

    pub fn powi(base: ExprTree, n: i32) -> ExprTree {
        ExprTree::Powi(Box::new(base), n)
    }

    pub fn difference(a: ExprTree, b: ExprTree) -> ExprTree {
        ExprTree::Sum(vec![a, ExprTree::neg(b)])
    }

    fn is_zero(&self) -> bool {
        match self {
            ExprTree::Poly(p) => p.is_zero(),
            ExprTree::Sum(v) => v.iter().all(ExprTree::is_zero),
            ExprTree::Product(v) => v.iter().any(ExprTree::is_zero),
            ExprTree::Quotient(n, _) => n.is_zero(),
            ExprTree::Neg(a) => a.is_zero(),
            ExprTree::Exp(_) | ExprTree::Powi(..) => false,
        }
    }

    /// Symbolic `d/dr`. Zero branches are dropped.
    pub fn derivative(&self) -> ExprTree {
        let zero = || ExprTree::Poly(LogPolynomial::zero());
        match self {
            ExprTree::Poly(p) => ExprTree::Poly(p.derivative()),
            ExprTree::Sum(items) => {
                let parts: Vec<_> = items
                    .iter()
                    .map(ExprTree::derivative)
                    .filter(|d| !d.is_zero())
                    .collect();
                if parts.is_empty() {
                    zero()
                } else {
                    ExprTree::Sum(parts)
                }
            }
            ExprTree::Product(items) => {
                let mut parts = Vec::new();
                for i in 0..items.len() {
                    let d = items[i].derivative();
                    if d.is_zero() {
                        continue;
                    }
                    let mut factors = items.clone();
                    factors[i] = d;
                    parts.push(ExprTree::Product(factors));
                }
                if parts.is_empty() {
                    zero()
                } else {
                    ExprTree::Sum(parts)
                }
            }
            ExprTree::Quotient(f, g) => {
                let (df, dg) = (f.derivative(), g.derivative());
                let mut num = Vec::new();
                if !df.is_zero() {
                    num.push(ExprTree::Product(vec![df, (**g).clone()]));
                }
                if !dg.is_zero() {
                    num.push(ExprTree::neg(ExprTree::Product(vec![(**f).clone(), dg])));
                }
                if num.is_empty() {
                    zero()
                } else {
                    ExprTree::quotient(ExprTree::Sum(num), ExprTree::powi((**g).clone(), 2))
                }
            }
            ExprTree::Exp(a) => {
                let da = a.derivative();
                if da.is_zero() {
                    zero()
                } else {
                    ExprTree::Product(vec![self.clone(), da])
                }
            }
            ExprTree::Neg(a) => {
                let da = a.derivative();
                if da.is_zero() {
                    zero()
                } else {
                    ExprTree::neg(da)
                }
            }
            ExprTree::Powi(a, n) => {
                let da = a.derivative();
                if *n == 0 || da.is_zero() {
                    zero()
                } else {
                    ExprTree::Product(vec![
                        ExprTree::constant(int(*n as i64)),
                        ExprTree::powi((**a).clone(), n - 1),
                        da,
                    ])
                }
            }
        }
    }

    /// Floating-point value at `r > 0`.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            ExprTree::Poly(p) => p.eval(r),
            ExprTree::Sum(v) => v.iter().map(|e| e.eval(r)).sum(),
            ExprTree::Product(v) => v.iter().map(|e| e.eval(r)).product(),
            ExprTree::Quotient(n, d) => n.eval(r) / d.eval(r),
            ExprTree::Exp(a) => a.eval(r).exp(),
            ExprTree::Neg(a) => -a.eval(r),
            ExprTree::Powi(a, n) => a.eval(r).powi(*n),
        }
    }

    pub fn compile(&self) -> CompiledExpr {
        match self {
            ExprTree::Poly(p) => CompiledExpr::Poly(p.compile()),
            ExprTree::Sum(v) => CompiledExpr::Sum(v.iter().map(ExprTree::compile).collect()),
            ExprTree::Product(v) => {
                CompiledExpr::Product(v.iter().map(ExprTree::compile).collect())
            }
            ExprTree::Quotient(n, d) => {
                CompiledExpr::Quotient(Box::new(n.compile()), Box::new(d.compile()))
            }
            ExprTree::Exp(a) => CompiledExpr::Exp(Box::new(a.compile())),
            ExprTree::Neg(a) => CompiledExpr::Neg(Box::new(a.compile())),
            ExprTree::Powi(a, n) => CompiledExpr::Powi(Box::new(a.compile()), *n),
        }
    }

    /// Natural interval extension.
    pub fn enclose(&self, r: Interval) -> Interval {
        self.compile().enclose(r)
    }
}

/// An [`ExprTree`] with floating-point interval coefficients.
#[derive(Debug, Clone)]
pub enum CompiledExpr {
    Poly(CompiledPoly),
    Sum(Vec<CompiledExpr>),
    Product(Vec<CompiledExpr>),
    Quotient(Box<CompiledExpr>, Box<CompiledExpr>),
    Exp(Box<CompiledExpr>),
    Neg(Box<CompiledExpr>),
    Powi(Box<CompiledExpr>, i32),
}

impl Enclose for CompiledExpr {
    fn enclose(&self, r: Interval) -> Interval {
        match self {
            CompiledExpr::Poly(p) => p.enclose(r),
            CompiledExpr::Sum(v) => v.iter().fold(Interval::ZERO, |acc, e| acc + e.enclose(r)),
            CompiledExpr::Product(v) => v.iter().fold(Interval::ONE, |acc, e| acc * e.enclose(r)),
            CompiledExpr::Quotient(n, d) => n.enclose(r) / d.enclose(r),
            CompiledExpr::Exp(a) => a.enclose(r).exp(),
            CompiledExpr::Neg(a) => -a.enclose(r),
            CompiledExpr::Powi(a, n) => a.enclose(r).powi(*n),
        }
    }
}

/// Mean-value form intersected with the natural extension:
/// `f(X) ⊂ (f(c) + f'(X)(X − c)) ∩ F(X)` with `c` the midpoint.
#[derive(Debug, Clone)]
pub struct Centered {
    f: CompiledExpr,
    df: CompiledExpr,
}

impl Centered {
    pub fn new(f: &ExprTree) -> Centered {
        Centered {
            f: f.compile(),
            df: f.derivative().compile(),
        }
    }
}

impl Enclose for Centered {
    fn enclose(&self, r: Interval) -> Interval {
        let natural = self.f.enclose(r);
        if r.is_point() || r.is_empty() {
            return natural;
        }
        let c = r.mid();
        let slope = self.df.enclose(r);
        let centered = self.f.enclose(Interval::point(c)) + slope * (r - Interval::point(c));
        let both = natural.intersect(centered);
        if both.is_empty() {
            natural
        } else {
            both
        }
    }

    fn enclose_point(&self, x: f64) -> Interval {
        self.f.enclose(Interval::point(x))
    }
}

/// S-expression form: `[log-polynomial]` leaves and `(+ ...)`, `(* ...)`,
/// `(/ a b)`, `(exp a)`, `(neg a)`, `(pow a n)` nodes.
impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, items: &[&ExprTree]| -> fmt::Result {
            write!(f, "({op}")?;
            for item in items {
                write!(f, " {item}")?;
            }
            write!(f, ")")
        };
        match self {
            ExprTree::Poly(p) => write!(f, "[{p}]"),
            ExprTree::Sum(v) => list(f, "+", &v.iter().collect::<Vec<_>>()),
            ExprTree::Product(v) => list(f, "*", &v.iter().collect::<Vec<_>>()),
            ExprTree::Quotient(n, d) => list(f, "/", &[n, d]),
            ExprTree::Exp(a) => list(f, "exp", &[a]),
            ExprTree::Neg(a) => list(f, "neg", &[a]),
            ExprTree::Powi(a, n) => write!(f, "(pow {a} {n})"),
        }
    }
}

impl FromStr for ExprTree {
    type Err = RadialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser { src: s, pos: 0 };
        let e = parser.expr()?;
        parser.skip_ws();
        if parser.pos != s.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> RadialError {
        RadialError::Parse(format!("{what} at byte {} of {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn word(&mut self) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '(' || c == ')' || c == '[' || c == ']' {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn expr(&mut self) -> Result<ExprTree, RadialError> {
        self.skip_ws();
        match self.peek() {
            Some('[') => {
                let close = self.src[self.pos..]
                    .find(']')
                    .ok_or_else(|| self.error("unclosed '['"))?;
                let body = &self.src[self.pos + 1..self.pos + close];
                self.pos += close + 1;
                Ok(ExprTree::Poly(body.parse()?))
            }
            Some('(') => {
                self.pos += 1;
                self.skip_ws();
                let op = self.word().to_string();
                let node = match op.as_str() {
                    "+" | "*" => {
                        let mut items = Vec::new();
                        loop {
                            self.skip_ws();
                            if self.peek() == Some(')') || self.peek().is_none() {
                                break;
                            }
                            items.push(self.expr()?);
                        }
                        if op == "+" {
                            ExprTree::Sum(items)
                        } else {
                            ExprTree::Product(items)
                        }
                    }
                    "/" => {
                        let n = self.expr()?;
                        let d = self.expr()?;
                        ExprTree::quotient(n, d)
                    }
                    "exp" => ExprTree::exp(self.expr()?),
                    "neg" => ExprTree::neg(self.expr()?),
                    "pow" => {
                        let base = self.expr()?;
                        self.skip_ws();
                        let n = self
                            .word()
                            .parse::<i32>()
                            .map_err(|_| self.error("bad integer power"))?;
                        ExprTree::powi(base, n)
                    }
                    _ => return Err(self.error("unknown operator")),
                };
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(node)
            }
            _ => Err(self.error("expected '[' or '('")),
        }
    }
}
