//! Symbolic scalar expressions over chart coordinates.
//!
//! Expressions are immutable trees with shared children. The smart
//! constructors ([`Expr::sum`], [`Expr::product`], [`Expr::pow`],
//! [`Expr::func`]) apply the simplification rewrites at the node they build,
//! so any tree assembled through them (and through the arithmetic operators)
//! is already in simplified form. Trees produced by the parser are kept
//! verbatim until [`Expr::simplify`] is called.

mod chart;
mod diff;
mod display;
mod eval;
mod parse;
pub mod random;
mod simplify;
mod zero;

use std::cmp::Ordering;
use std::sync::Arc;

pub use chart::{Chart, Sampling};
pub use parse::parse_one_form_coeffs;
pub use zero::{Check, ZeroTest};

/// A chart coordinate referenced by an expression.
#[derive(Clone, Debug)]
pub struct Var {
    pub index: usize,
    pub name: Arc<str>,
}

/// Elementary unary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Symbolic scalar expression.
#[derive(Clone, Debug)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Add(Arc<[Expr]>),
    Mul(Arc<[Expr]>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Func(Func, Arc<Expr>),
}

impl Expr {
    pub const ZERO: Expr = Expr::Const(0.0);
    pub const ONE: Expr = Expr::Const(1.0);

    pub fn constant(value: f64) -> Expr {
        // -0.0 and 0.0 must compare equal structurally
        if value == 0.0 {
            Expr::Const(0.0)
        } else {
            Expr::Const(value)
        }
    }

    pub fn variable(index: usize, name: impl Into<Arc<str>>) -> Expr {
        Expr::Var(Var {
            index,
            name: name.into(),
        })
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// True only for the literal constant zero.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 1.0)
    }

    /// Whether the coordinate with the given index occurs in the tree.
    pub fn depends_on(&self, index: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => v.index == index,
            Expr::Add(ts) | Expr::Mul(ts) => ts.iter().any(|t| t.depends_on(index)),
            Expr::Div(a, b) | Expr::Pow(a, b) => a.depends_on(index) || b.depends_on(index),
            Expr::Neg(a) | Expr::Func(_, a) => a.depends_on(index),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_var_index(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(v) => Some(v.index),
            Expr::Add(ts) | Expr::Mul(ts) => ts.iter().filter_map(Expr::max_var_index).max(),
            Expr::Div(a, b) | Expr::Pow(a, b) => a.max_var_index().max(b.max_var_index()),
            Expr::Neg(a) | Expr::Func(_, a) => a.max_var_index(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Add(ts) | Expr::Mul(ts) => 1 + ts.iter().map(Expr::size).sum::<usize>(),
            Expr::Div(a, b) | Expr::Pow(a, b) => 1 + a.size() + b.size(),
            Expr::Neg(a) | Expr::Func(_, a) => 1 + a.size(),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(_) => 1,
            Expr::Pow(..) => 2,
            Expr::Func(..) => 3,
            Expr::Mul(_) => 4,
            Expr::Add(_) => 5,
            Expr::Div(..) => 6,
            Expr::Neg(_) => 7,
        }
    }

    /// Total structural order used to canonicalize sums and products.
    pub fn structural_cmp(&self, other: &Expr) -> Ordering {
        use Expr::*;
        match (self, other) {
            (Const(a), Const(b)) => a.total_cmp(b),
            (Var(a), Var(b)) => a.index.cmp(&b.index),
            (Add(a), Add(b)) | (Mul(a), Mul(b)) => cmp_slices(a, b),
            (Div(a1, b1), Div(a2, b2)) | (Pow(a1, b1), Pow(a2, b2)) => a1
                .structural_cmp(a2)
                .then_with(|| b1.structural_cmp(b2)),
            (Neg(a), Neg(b)) => a.structural_cmp(b),
            (Func(f, a), Func(g, b)) => f.cmp(g).then_with(|| a.structural_cmp(b)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

fn cmp_slices(a: &[Expr], b: &[Expr]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.structural_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.structural_cmp(other) == Ordering::Equal
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.structural_cmp(other)
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Self {
        Expr::constant(value)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
        impl std::ops::$tr<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, Expr::constant(rhs))
            }
        }
        impl std::ops::$tr<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), Expr::constant(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum(vec![a, b]));
binop!(Sub, sub, |a, b| Expr::sum(vec![a, b.negate()]));
binop!(Mul, mul, |a, b| Expr::product(vec![a, b]));
binop!(Div, div, |a, b| Expr::quotient(a, b));

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.negate()
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.clone().negate()
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter.collect())
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::product(iter.collect())
    }
}

#[cfg(test)]
mod tests;
