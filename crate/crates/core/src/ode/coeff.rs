use std::cell::RefCell;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::expr::{differentiate_with, evaluate_with, simplify, Expr};
use crate::scalar::Scalar;

// Derivative orders cached for expression-backed coefficients.
const CACHED_ORDERS: usize = 4;

/// A coefficient function of `x`.
///
/// * symbolic: a parameter-free [`Expr`], differentiated exactly;
/// * grid: samples with stored derivatives, see [`Grid`];
/// * composite: an expression in `x` whose reserved parameters stand for
///   grid functions and their derivatives. Arithmetic that mixes symbolic
///   and grid inputs produces these, so nothing is ever resampled.
#[derive(Clone)]
pub struct CoeffFn<T> {
    repr: Repr<T>,
}

#[derive(Clone)]
enum Repr<T> {
    Expr {
        derivs: Arc<[OnceLock<Expr>; CACHED_ORDERS]>,
        leaves: Arc<[Arc<Grid<T>>]>,
    },
    Grid(Arc<Grid<T>>),
}

fn leaf_name(leaf: usize, order: usize) -> String {
    format!("@{leaf}.{order}")
}

fn parse_leaf(name: &str) -> Option<(usize, usize)> {
    let (leaf, order) = name.strip_prefix('@')?.split_once('.')?;
    Some((leaf.parse().ok()?, order.parse().ok()?))
}

fn leaf_derivative(name: &str) -> Option<Expr> {
    parse_leaf(name).map(|(i, k)| Expr::Param(leaf_name(i, k + 1)))
}

fn cache(e: Expr) -> Arc<[OnceLock<Expr>; CACHED_ORDERS]> {
    let cells: [OnceLock<Expr>; CACHED_ORDERS] = Default::default();
    let _ = cells[0].set(e);
    Arc::new(cells)
}

impl<T: Scalar> CoeffFn<T> {
    /// Wraps a closed-form expression. Parameters must already be bound;
    /// a leftover one is reported when the function is evaluated.
    pub fn symbolic(e: Expr) -> Self {
        CoeffFn {
            repr: Repr::Expr {
                derivs: cache(simplify(&e)),
                leaves: Arc::from(Vec::new()),
            },
        }
    }

    pub fn constant(c: f64) -> Self {
        CoeffFn::symbolic(Expr::Const(c))
    }

    pub fn zero() -> Self {
        CoeffFn::constant(0.0)
    }

    pub fn grid(g: Grid<T>) -> Self {
        CoeffFn {
            repr: Repr::Grid(Arc::new(g)),
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(&self.repr, Repr::Expr { leaves, .. } if leaves.is_empty())
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.repr, Repr::Grid(_))
    }

    /// The expression of a symbolic coefficient.
    pub fn as_expr(&self) -> Option<&Expr> {
        match &self.repr {
            Repr::Expr { derivs, leaves } if leaves.is_empty() => derivs[0].get(),
            _ => None,
        }
    }

    pub fn as_grid(&self) -> Option<&Grid<T>> {
        match &self.repr {
            Repr::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// Interval on which the function can be evaluated, when bounded.
    pub fn span(&self) -> Option<(T, T)> {
        let spans: Vec<(T, T)> = match &self.repr {
            Repr::Grid(g) => vec![g.span()],
            Repr::Expr { leaves, .. } => leaves.iter().map(|g| g.span()).collect(),
        };
        spans
            .into_iter()
            .reduce(|(a, b), (c, d)| (a.max(c), b.min(d)))
    }

    fn derivative_expr(&self, order: usize) -> Option<&Expr> {
        let Repr::Expr { derivs, .. } = &self.repr else {
            return None;
        };
        if order >= CACHED_ORDERS {
            return None;
        }
        if let Some(e) = derivs[order].get() {
            return Some(e);
        }
        let prev = self.derivative_expr(order - 1)?.clone();
        Some(derivs[order].get_or_init(|| differentiate_with(&prev, &leaf_derivative)))
    }

    /// Derivative of order `order` (0 = value) at `x`.
    pub fn eval(&self, x: T, order: usize) -> Result<T> {
        match &self.repr {
            Repr::Grid(g) => g.eval(x, order),
            Repr::Expr { leaves, .. } => {
                let e = match self.derivative_expr(order) {
                    Some(e) => e.clone(),
                    None if order >= CACHED_ORDERS => {
                        // rarely needed: differentiate on the spot
                        let mut e = self.derivative_expr(CACHED_ORDERS - 1).cloned().unwrap_or(Expr::Const(0.0));
                        for _ in CACHED_ORDERS - 1..order {
                            e = differentiate_with(&e, &leaf_derivative);
                        }
                        e
                    }
                    None => unreachable!("cached orders are always derivable"),
                };
                eval_with_leaves(&e, x, leaves)
            }
        }
    }

    /// `(f, f', f'')` at `x`.
    pub fn jet(&self, x: T) -> Result<(T, T, T)> {
        match &self.repr {
            Repr::Grid(g) => g.jet(x),
            _ => Ok((self.eval(x, 0)?, self.eval(x, 1)?, self.eval(x, 2)?)),
        }
    }

    /// Numeric equality with `other` at `n` Chebyshev nodes of `interval`,
    /// in the sense of [`crate::expr::equivalent`].
    pub fn equivalent(&self, other: &CoeffFn<T>, interval: (T, T), n: usize, reltol: T) -> Result<bool> {
        let (lo, hi) = interval;
        if !(lo < hi) || n < 2 {
            return Err(Error::InvalidArgument(format!(
                "need lo < hi and n >= 2, got [{lo}, {hi}] and n = {n}"
            )));
        }
        for x in crate::scalar::chebyshev_nodes(lo, hi, n) {
            let (a, b) = (self.eval(x, 0)?, other.eval(x, 0)?);
            if !((a - b).abs() <= reltol * (T::one() + a.abs().max(b.abs()))) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The derivative as a coefficient function of its own.
    pub fn derivative(&self) -> Self {
        let mut lift = Lifter::new();
        let e = lift.lift(self);
        let d = lift.diff(&e);
        lift.finish(d)
    }
}

fn eval_with_leaves<T: Scalar>(e: &Expr, x: T, leaves: &[Arc<Grid<T>>]) -> Result<T> {
    if leaves.is_empty() {
        return evaluate_with(e, x, &|_| None);
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let lookup = |name: &str| {
        let (i, k) = parse_leaf(name)?;
        let leaf = leaves.get(i)?;
        match leaf.eval(x, k) {
            Ok(v) => Some(v),
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                None
            }
        }
    };
    let out = evaluate_with(e, x, &lookup);
    match failure.into_inner() {
        Some(err) if out.is_err() => Err(err),
        _ => out,
    }
}

impl<T: Scalar> From<Expr> for CoeffFn<T> {
    fn from(e: Expr) -> Self {
        CoeffFn::symbolic(e)
    }
}

impl<T: Scalar> From<Grid<T>> for CoeffFn<T> {
    fn from(g: Grid<T>) -> Self {
        CoeffFn::grid(g)
    }
}

impl<T> fmt::Debug for CoeffFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Grid(g) => write!(f, "CoeffFn(<grid: {} nodes>)", g.len()),
            Repr::Expr { derivs, leaves } => {
                write!(f, "CoeffFn({:?}, {} grid terms)", derivs[0].get(), leaves.len())
            }
        }
    }
}

impl<T: fmt::Display + Copy> fmt::Display for CoeffFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Grid(g) => {
                let (a, b) = g.span();
                write!(f, "<grid: {} nodes on [{a}, {b}]>", g.nodes().len())
            }
            Repr::Expr { derivs, leaves } => {
                let e = derivs[0].get().expect("value expression is always set");
                if leaves.is_empty() {
                    write!(f, "{e}")
                } else {
                    write!(f, "{e} <{} grid terms>", leaves.len())
                }
            }
        }
    }
}

/// Turns coefficient functions into expressions so formulas can be built
/// with ordinary [`Expr`] arithmetic, then packs the result back.
///
/// Grid functions become reserved parameters `@i.k` (derivative `k` of grid
/// `i`), which the grammar cannot spell, so they never collide with user
/// parameters.
#[derive(Default)]
pub struct Lifter<T> {
    leaves: Vec<Arc<Grid<T>>>,
}

impl<T: Scalar> Lifter<T> {
    pub fn new() -> Self {
        Lifter { leaves: Vec::new() }
    }

    fn index_of(&mut self, g: &Arc<Grid<T>>) -> usize {
        match self.leaves.iter().position(|l| Arc::ptr_eq(l, g)) {
            Some(i) => i,
            None => {
                self.leaves.push(Arc::clone(g));
                self.leaves.len() - 1
            }
        }
    }

    pub fn lift(&mut self, f: &CoeffFn<T>) -> Expr {
        match &f.repr {
            Repr::Grid(g) => Expr::Param(leaf_name(self.index_of(g), 0)),
            Repr::Expr { derivs, leaves } => {
                let e = derivs[0].get().expect("value expression is always set");
                if leaves.is_empty() {
                    return e.clone();
                }
                let map: Vec<usize> = leaves.iter().map(|g| self.index_of(g)).collect();
                e.map(&mut |node| match &node {
                    Expr::Param(p) => match parse_leaf(p) {
                        Some((i, k)) => Expr::Param(leaf_name(map[i], k)),
                        None => node,
                    },
                    _ => node,
                })
            }
        }
    }

    /// Derivative of a lifted expression.
    pub fn diff(&self, e: &Expr) -> Expr {
        differentiate_with(e, &leaf_derivative)
    }

    /// Packs `e` as a coefficient function: symbolic if no grid is
    /// referenced, the grid itself if `e` is exactly one grid value.
    pub fn finish(&self, e: Expr) -> CoeffFn<T> {
        let e = simplify(&e);
        let used: Vec<usize> = {
            let mut v: Vec<usize> = e
                .params()
                .iter()
                .filter_map(|p| parse_leaf(p).map(|(i, _)| i))
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        if used.is_empty() {
            return CoeffFn::symbolic(e);
        }
        if let Expr::Param(p) = &e {
            if let Some((i, 0)) = parse_leaf(p) {
                return CoeffFn {
                    repr: Repr::Grid(Arc::clone(&self.leaves[i])),
                };
            }
        }
        let renumbered = e.map(&mut |node| match &node {
            Expr::Param(p) => match parse_leaf(p) {
                Some((i, k)) => {
                    let j = used.binary_search(&i).expect("collected above");
                    Expr::Param(leaf_name(j, k))
                }
                None => node,
            },
            _ => node,
        });
        let leaves: Vec<Arc<Grid<T>>> = used.iter().map(|&i| Arc::clone(&self.leaves[i])).collect();
        CoeffFn {
            repr: Repr::Expr {
                derivs: cache(renumbered),
                leaves: Arc::from(leaves),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn sym(text: &str) -> CoeffFn<f64> {
        CoeffFn::symbolic(parse(text).unwrap())
    }

    fn square_grid() -> CoeffFn<f64> {
        let xs: Vec<f64> = (0..=100).map(|i| 1.0 + i as f64 * 0.02).collect();
        let g = Grid::new(
            xs.clone(),
            xs.iter().map(|x| x * x).collect(),
            xs.iter().map(|x| 2.0 * x).collect(),
        )
        .unwrap()
        .with_curvatures(vec![2.0; xs.len()])
        .unwrap();
        CoeffFn::grid(g)
    }

    #[test]
    fn symbolic_derivatives() {
        let f = sym("1/(2*x)");
        let (v, d, dd) = f.jet(2.0).unwrap();
        assert_eq!((v, d, dd), (0.25, -0.125, 0.125));
        assert!((f.eval(2.0, 3).unwrap() + 3.0 / 16.0).abs() < 1e-15);
        assert!((f.eval(2.0, 5).unwrap() + 120.0 / 2.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn composite_keeps_grid_exactness() {
        let g = square_grid();
        let mut lift = Lifter::new();
        let ge = lift.lift(&g);
        // x * g(x)^2 = x^5
        let e = Expr::x() * ge.clone() * ge;
        let f = lift.finish(e);
        assert!(!f.is_symbolic() && !f.is_grid());
        assert!((f.eval(1.5, 0).unwrap() - 1.5f64.powi(5)).abs() < 1e-12);
        assert!((f.eval(1.5, 1).unwrap() - 5.0 * 1.5f64.powi(4)).abs() < 1e-10);
        assert!((f.derivative().eval(1.5, 0).unwrap() - 5.0 * 1.5f64.powi(4)).abs() < 1e-10);
        assert!(matches!(f.eval(0.5, 0), Err(Error::OutOfSpan { .. })));
        assert_eq!(f.span(), Some((1.0, 3.0)));
    }

    #[test]
    fn finishing_trivial_lifts() {
        let g = square_grid();
        let mut lift = Lifter::new();
        let e = lift.lift(&g);
        assert!(lift.finish(e.clone()).is_grid());
        assert!(lift.finish(e * 0.0 + Expr::x()).is_symbolic());
    }

    #[test]
    fn composites_relift_into_new_contexts() {
        let (a, b) = (square_grid(), square_grid());
        let mut l1 = Lifter::new();
        let ab = {
            let (ea, eb) = (l1.lift(&a), l1.lift(&b));
            l1.finish(ea - eb * 2.0)
        };
        let mut l2 = Lifter::new();
        let eb = l2.lift(&b);
        let eab = l2.lift(&ab);
        let f = l2.finish(eab + eb);
        // a - 2b + b = a - b = 0 everywhere
        assert!(f.eval(2.2, 0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn unbound_parameter_is_reported() {
        let f = sym("a*x");
        assert!(matches!(f.eval(1.0, 0), Err(Error::UnboundParameter(_))));
    }
}
