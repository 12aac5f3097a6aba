//! A minimal computer-algebra core over one independent variable `x`.
//!
//! Expressions are plain trees. Parsing follows the grammar
//!
//! ```text
//! number     := digits ["." digits] [("e"|"E") ["+"|"-"] digits]
//! identifier := [A-Za-z_][A-Za-z0-9_]*      ("x" is the variable, "pi" is π)
//! call       := ("exp"|"ln"|"sin"|"cos"|"sinh"|"cosh"|"sqrt") "(" expr ")"
//! operators  := + - * / ^ and parentheses
//! ```
//!
//! with `^` right-associative and tightest, unary minus looser than `^` but
//! tighter than `*` and `/`. Equality of two expressions is decided
//! numerically by [`equivalent`]; [`simplify`] only folds constants and drops
//! neutral elements.

mod diff;
mod display;
mod equiv;
mod eval;
mod laurent;
mod parse;
mod simplify;

use std::collections::BTreeMap;
use std::ops;

pub use diff::{differentiate, differentiate_with};
pub use equiv::equivalent;
pub use eval::{evaluate, evaluate_with};
pub use laurent::{antiderivative, div_exact, Laurent};
pub use parse::parse;
pub use simplify::simplify;

/// Elementary functions available as call nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Exp,
        Func::Ln,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn apply(self, arg: Expr) -> Expr {
        Expr::Call(self, Box::new(arg))
    }
}

/// Expression tree node.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Pi,
    /// The independent variable `x`.
    Var,
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn x() -> Expr {
        Expr::Var
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn pow(self, exponent: Expr) -> Expr {
        Expr::Pow(Box::new(self), Box::new(exponent))
    }

    pub fn powi(self, n: i32) -> Expr {
        self.pow(Expr::Const(n as f64))
    }

    pub fn exp(self) -> Expr {
        Func::Exp.apply(self)
    }

    pub fn ln(self) -> Expr {
        Func::Ln.apply(self)
    }

    pub fn sqrt(self) -> Expr {
        Func::Sqrt.apply(self)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_const(&self, v: f64) -> bool {
        self.as_const() == Some(v)
    }

    pub fn is_zero(&self) -> bool {
        self.is_const(0.0)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().map(Expr::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().map(Expr::depth).max().unwrap_or(0)
    }

    fn children(&self) -> impl Iterator<Item = &Expr> {
        let (a, b): (Option<&Expr>, Option<&Expr>) = match self {
            Expr::Const(_) | Expr::Pi | Expr::Var | Expr::Param(_) => (None, None),
            Expr::Neg(a) | Expr::Call(_, a) => (Some(a), None),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => (Some(a), Some(b)),
        };
        a.into_iter().chain(b)
    }

    /// True when `x` occurs anywhere in the tree.
    pub fn depends_on_x(&self) -> bool {
        matches!(self, Expr::Var) || self.children().any(Expr::depends_on_x)
    }

    /// Names of all parameters, sorted and deduplicated.
    pub fn params(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            if let Expr::Param(p) = e {
                out.push(p.clone());
            }
            for c in e.children() {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Rebuilds the tree bottom-up, letting `f` replace any node.
    pub fn map(&self, f: &mut dyn FnMut(Expr) -> Expr) -> Expr {
        let rebuilt = match self {
            Expr::Const(_) | Expr::Pi | Expr::Var | Expr::Param(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.map(f))),
            Expr::Call(func, a) => Expr::Call(*func, Box::new(a.map(f))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.map(f)), Box::new(b.map(f))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.map(f)), Box::new(b.map(f))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.map(f)), Box::new(b.map(f))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.map(f)), Box::new(b.map(f))),
            Expr::Pow(a, b) => Expr::Pow(Box::new(a.map(f)), Box::new(b.map(f))),
        };
        f(rebuilt)
    }

    /// Replaces every parameter found in `values` by its constant.
    pub fn bind_params(&self, values: &BTreeMap<String, f64>) -> Expr {
        self.map(&mut |e| match &e {
            Expr::Param(p) => values.get(p).map_or(e.clone(), |v| Expr::Const(*v)),
            _ => e,
        })
    }

    /// Replaces parameter `name` by `with`.
    pub fn substitute(&self, name: &str, with: &Expr) -> Expr {
        self.map(&mut |e| match &e {
            Expr::Param(p) if p == name => with.clone(),
            _ => e,
        })
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Expr {
        Expr::Const(v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$variant(Box::new(self), Box::new(Expr::Const(rhs)))
            }
        }
        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(Expr::Const(self)), Box::new(rhs))
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$variant(Box::new(self.clone()), Box::new(rhs.clone()))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self.clone()))
    }
}

/// Values for `x` and the named parameters of an expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Bindings<T> {
    pub x: T,
    pub params: BTreeMap<String, T>,
}

impl<T: Copy> Bindings<T> {
    pub fn at(x: T) -> Self {
        Bindings {
            x,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: T) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<T> {
        self.params.get(name).copied()
    }
}
