//! Minimal symbolic kernel.
//!
//! Expressions are immutable trees with exact rational coefficients. Every
//! operation returns a new tree; [`canonicalize`] brings a tree to the normal
//! form used for structural comparison.

mod canon;
mod cx;
mod diff;
mod eval;
mod parse;
mod print;
mod subst;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use canon::{canonicalize, equals, is_zero};
pub use cx::Cx;
pub use diff::{differentiate, solve_linear, total_derivative};
pub use eval::{eval_numeric, Env};
pub use parse::parse_infix;
pub use print::display_name;
pub use subst::{substitute, Bindings};

/// Exact coefficient type.
pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("bound-variable differentiation: `{0}` is bound by an integral")]
    BoundDifferentiation(String),
    #[error("substitution would bind or capture bound symbol `{0}`")]
    BoundSubstitution(String),
    #[error("integral limit `{0}` can only be renamed to another symbol")]
    LimitSubstitution(String),
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("non-finite intermediate value in {0}")]
    NonFinite(String),
    #[error("quadrature did not converge on integral over `{0}`")]
    Quadrature(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Independent,
    Dependent,
    Parameter,
    Bound,
}

/// A named symbol. The role is fixed when the symbol is created.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: Arc<str>,
    role: Role,
}

impl Symbol {
    pub fn new(name: &str, role: Role) -> Self {
        Symbol {
            name: Arc::from(name),
            role,
        }
    }

    pub fn independent(name: &str) -> Self {
        Self::new(name, Role::Independent)
    }

    pub fn dependent(name: &str) -> Self {
        Self::new(name, Role::Dependent)
    }

    pub fn parameter(name: &str) -> Self {
        Self::new(name, Role::Parameter)
    }

    pub fn bound(name: &str) -> Self {
        Self::new(name, Role::Bound)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn expr(&self) -> Expr {
        Expr::Sym(self.clone())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Expression tree.
///
/// Negation is a product with the constant `-1`; subtraction and division are
/// built from sums, products and powers. `Integral` is a definite integral
/// whose lower limit is constant and whose upper limit is a symbol; it is never
/// expanded symbolically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Num(Rational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Rational),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Derivative {
        expr: Box<Expr>,
        var: Symbol,
        order: u32,
    },
    Integral {
        integrand: Box<Expr>,
        bound: Symbol,
        lower: Box<Expr>,
        upper: Symbol,
    },
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rat(num: i64, den: i64) -> Expr {
        Expr::Num(rational(num, den))
    }

    pub fn zero() -> Expr {
        Expr::Num(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rational::one())
    }

    pub fn pow(self, exp: Rational) -> Expr {
        Expr::Pow(Box::new(self), exp)
    }

    pub fn powi(self, exp: i64) -> Expr {
        self.pow(Rational::from_integer(BigInt::from(exp)))
    }

    pub fn sqrt(self) -> Expr {
        self.pow(rational(1, 2))
    }

    pub fn recip(self) -> Expr {
        self.powi(-1)
    }

    pub fn sin(self) -> Expr {
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Cos(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    /// Unevaluated derivative; [`canonicalize`] carries it out.
    pub fn derivative(self, var: &Symbol, order: u32) -> Expr {
        Expr::Derivative {
            expr: Box::new(self),
            var: var.clone(),
            order,
        }
    }

    /// `∫_lower^upper integrand d(bound)`.
    pub fn integral(integrand: Expr, bound: &Symbol, lower: Expr, upper: &Symbol) -> Expr {
        Expr::Integral {
            integrand: Box::new(integrand),
            bound: bound.clone(),
            lower: Box::new(lower),
            upper: upper.clone(),
        }
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self {
            Expr::Num(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_num_zero(&self) -> bool {
        matches!(self, Expr::Num(c) if c.is_zero())
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Num(_) | Expr::Sym(_) => vec![],
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().collect(),
            Expr::Pow(b, _) => vec![b],
            Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => vec![a],
            Expr::Derivative { expr, .. } => vec![expr],
            Expr::Integral {
                integrand, lower, ..
            } => vec![integrand, lower],
        }
    }

    /// Symbols occurring free (bound integration variables excluded,
    /// integral upper limits included).
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Derivative { expr, var, .. } => {
                expr.collect_free(out);
                out.insert(var.clone());
            }
            Expr::Integral {
                integrand,
                bound,
                lower,
                upper,
            } => {
                let mut inner = BTreeSet::new();
                integrand.collect_free(&mut inner);
                inner.remove(bound);
                out.extend(inner);
                lower.collect_free(out);
                out.insert(upper.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_free(out);
                }
            }
        }
    }

    pub fn bound_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_bound(&mut out);
        out
    }

    fn collect_bound(&self, out: &mut BTreeSet<Symbol>) {
        if let Expr::Integral { bound, .. } = self {
            out.insert(bound.clone());
        }
        for c in self.children() {
            c.collect_bound(out);
        }
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.free_symbols().contains(s)
    }

    pub fn contains_integral(&self) -> bool {
        matches!(self, Expr::Integral { .. }) || self.children().iter().any(|c| c.contains_integral())
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Fully parenthesized prefix serialization.
    pub fn to_prefix(&self) -> String {
        print::prefix(self)
    }

    /// Infix rendering with subscripted display names.
    pub fn to_infix(&self) -> String {
        print::infix(self)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Self {
        s.expr()
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::Num(c)
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_prefix())
    }
}

impl serde::Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_prefix())
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs.recip()])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Num(c) => Expr::Num(-c),
            e => Expr::Mul(vec![Expr::int(-1), e]),
        }
    }
}

macro_rules! ref_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr { self.clone().$m(rhs.clone()) }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { self.clone().$m(rhs) }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr { self.$m(rhs.clone()) }
        }
    )*};
}
ref_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

/// Sum of an iterator of expressions (raw, not canonicalized).
pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
    let v: Vec<Expr> = terms.into_iter().collect();
    match v.len() {
        0 => Expr::zero(),
        1 => v.into_iter().next().unwrap(),
        _ => Expr::Add(v),
    }
}

/// Product of an iterator of expressions (raw, not canonicalized).
pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
    let v: Vec<Expr> = factors.into_iter().collect();
    match v.len() {
        0 => Expr::one(),
        1 => v.into_iter().next().unwrap(),
        _ => Expr::Mul(v),
    }
}

pub(crate) fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub(crate) fn is_positive_integer(q: &Rational) -> bool {
    is_integer(q) && q.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_symbols_exclude_bound() {
        let th = Symbol::independent("theta");
        let s = Symbol::bound("s");
        let a = Symbol::parameter("alpha");
        let e = Expr::integral((th.expr() - s.expr()).sin() * a.expr(), &s, Expr::zero(), &th);
        let free = e.free_symbols();
        assert!(free.contains(&th));
        assert!(free.contains(&a));
        assert!(!free.contains(&s));
        assert!(e.bound_symbols().contains(&s));
        assert!(e.contains_integral());
    }

    #[test]
    fn symbol_role_is_part_of_identity() {
        assert_ne!(Symbol::parameter("L"), Symbol::dependent("L"));
        assert_eq!(Symbol::parameter("L").role(), Role::Parameter);
    }
}
