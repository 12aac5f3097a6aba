//! Riccati linearization and the operator family `T = d/dx + Aψ + B`.

use crate::error::{Error, Result};
use crate::expr::{differentiate_with, evaluate_with, simplify, Expr};
use crate::ode::{integrate_system, CoeffFn, Ivp, Lifter, Trajectory};
use crate::scalar::Scalar;

/// Largest supported power of `T`.
pub const MAX_TN_ORDER: usize = 6;

/// `ψ' + A ψ² + B ψ + C1 = 0`.
#[derive(Clone, Debug)]
pub struct RiccatiSpec<T> {
    pub a: CoeffFn<T>,
    pub b: CoeffFn<T>,
    pub c1: CoeffFn<T>,
}

/// `lead·φ'' + first·φ' + zeroth·φ = 0`, reached through `ψ = φ'/(Aφ)`.
#[derive(Clone, Debug)]
pub struct LinearizedRiccati<T> {
    pub lead: CoeffFn<T>,
    pub first: CoeffFn<T>,
    pub zeroth: CoeffFn<T>,
}

impl<T: Scalar> RiccatiSpec<T> {
    pub fn new(a: CoeffFn<T>, b: CoeffFn<T>, c1: CoeffFn<T>) -> Self {
        RiccatiSpec { a, b, c1 }
    }

    /// `ψ' + Aψ² + Bψ + C1` at `x`.
    pub fn residual(&self, x: T, psi: T, dpsi: T) -> Result<T> {
        Ok(dpsi + self.a.eval(x, 0)? * psi * psi + self.b.eval(x, 0)? * psi + self.c1.eval(x, 0)?)
    }
}

/// Coefficients of `Aφ'' + (BA − A')φ' + C1A²φ = 0`.
pub fn riccati_linearize<T: Scalar>(spec: &RiccatiSpec<T>) -> LinearizedRiccati<T> {
    let mut lift = Lifter::new();
    let a = lift.lift(&spec.a);
    let b = lift.lift(&spec.b);
    let c1 = lift.lift(&spec.c1);
    let da = lift.diff(&a);
    LinearizedRiccati {
        lead: lift.finish(a.clone()),
        first: lift.finish(b * a.clone() - da),
        zeroth: lift.finish(c1 * a.clone() * a),
    }
}

impl<T: Scalar> LinearizedRiccati<T> {
    /// The equation in the form `φ'' = Uφ + Kφ'`, as `(U, K)`.
    pub fn explicit(&self) -> (CoeffFn<T>, CoeffFn<T>) {
        let mut lift = Lifter::new();
        let lead = lift.lift(&self.lead);
        let first = lift.lift(&self.first);
        let zeroth = lift.lift(&self.zeroth);
        (
            lift.finish(-(zeroth / lead.clone())),
            lift.finish(-(first / lead)),
        )
    }
}

/// Name of the reserved parameter standing for `ψ^(k)`.
pub fn psi_name(k: usize) -> String {
    format!("psi{k}")
}

fn psi_index(name: &str) -> Option<usize> {
    name.strip_prefix("psi")?.parse().ok()
}

/// A polynomial differential expression in `ψ, ψ', …, ψ^(order)` and `x`.
/// The derivatives are the parameters `psi0`, `psi1`, ….
#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearForm {
    pub expr: Expr,
    pub order: usize,
}

impl NonlinearForm {
    /// `ψ` itself.
    pub fn psi() -> Self {
        NonlinearForm {
            expr: Expr::param(psi_name(0)),
            order: 0,
        }
    }

    /// Value at `x` with `psi[k] = ψ^(k)`.
    pub fn evaluate<T: Scalar>(&self, x: T, psi: &[T]) -> Result<T> {
        if psi.len() <= self.order {
            return Err(Error::InvalidArgument(format!(
                "need {} derivatives of psi, got {}",
                self.order + 1,
                psi.len()
            )));
        }
        evaluate_with(&self.expr, x, &|name| psi_index(name).and_then(|k| psi.get(k).copied()))
    }
}

fn closed_form<'a, T: Scalar>(f: &'a CoeffFn<T>, what: &str) -> Result<&'a Expr> {
    f.as_expr().ok_or_else(|| Error::Unavailable {
        what: format!("closed form of {what} (T^n expansion)"),
    })
}

/// `T F = dF/dx + (Aψ + B) F`, where `d/dx` is the total derivative.
pub fn apply_t<T: Scalar>(form: &NonlinearForm, a: &CoeffFn<T>, b: &CoeffFn<T>) -> Result<NonlinearForm> {
    let (a, b) = (closed_form(a, "A")?, closed_form(b, "B")?);
    let total = differentiate_with(&form.expr, &|name| psi_index(name).map(|k| Expr::param(psi_name(k + 1))));
    let psi = Expr::param(psi_name(0));
    let expr = simplify(&(total + (a.clone() * psi + b.clone()) * form.expr.clone()));
    Ok(NonlinearForm {
        expr,
        order: form.order + 1,
    })
}

/// `Tⁿ ψ` expanded by the product and chain rules, for `1 ≤ n ≤ 6`.
pub fn tn_expand<T: Scalar>(n: usize, a: &CoeffFn<T>, b: &CoeffFn<T>) -> Result<NonlinearForm> {
    if !(1..=MAX_TN_ORDER).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "T^n is supported for 1 <= n <= {MAX_TN_ORDER}, got n = {n}"
        )));
    }
    (0..n).try_fold(NonlinearForm::psi(), |f, _| apply_t(&f, a, b))
}

/// Integrates `φ^(n+1) = Q φ` for the state `(φ, φ', …, φ^(n))`.
pub fn solve_tn_linear<T: Scalar>(n: usize, q: &CoeffFn<T>, ivp: &Ivp<T>) -> Result<Trajectory<T>> {
    if ivp.state.len() != n + 1 {
        return Err(Error::InvalidIvp(format!(
            "expected {} initial values, got {}",
            n + 1,
            ivp.state.len()
        )));
    }
    let rhs = |x: T, y: &[T], d: &mut [T]| {
        d[..n].copy_from_slice(&y[1..]);
        d[n] = q.eval(x, 0)? * y[0];
        Ok(())
    };
    integrate_system(rhs, ivp)
}

/// `ψ, ψ', …, ψ^(m)` for `ψ = φ'/φ` from `φ, …, φ^(m+1)`, using
/// `φ^(k+1) = Σ_j C(k,j) ψ^(j) φ^(k−j)`.
pub fn log_derivatives<T: Scalar>(phi: &[T]) -> Vec<T> {
    let m = phi.len() - 1;
    let mut psi: Vec<T> = Vec::with_capacity(m);
    for k in 0..m {
        let mut acc = phi[k + 1];
        let mut binom = 1.0;
        for (j, pj) in psi.iter().enumerate() {
            acc = acc - T::lit(binom) * *pj * phi[k - j];
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        psi.push(acc / phi[0]);
    }
    psi
}

/// Checks `Tⁿ(φ'/φ) = Q` (with `A = 1`, `B = 0`) at every step of `phi` inside
/// `interval`. `phi` must come from [`solve_tn_linear`]: its states are
/// `φ, …, φ^(n)` and the last rate is `φ^(n+1)` from the generating
/// equation.
pub fn tn_substitution_check<T: Scalar>(
    n: usize,
    q: &CoeffFn<T>,
    phi: &Trajectory<T>,
    interval: (T, T),
    tol: T,
) -> Result<bool> {
    let one = CoeffFn::<T>::constant(1.0);
    let form = tn_expand(n, &one, &CoeffFn::zero())?;
    let (lo, hi) = interval;
    let mut sampled = 0;
    for (i, &x) in phi.xs().iter().enumerate() {
        if x < lo || x > hi {
            continue;
        }
        let state = phi.state(i);
        if state.len() != n + 1 {
            return Err(Error::InvalidArgument(format!(
                "trajectory carries {} derivatives, expected {}",
                state.len(),
                n + 1
            )));
        }
        let scale = state.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if state[0].abs() <= T::lit(1e-12) * scale || state[0] == T::zero() {
            return Err(Error::Vanishes {
                what: "phi",
                x: x.as_f64(),
            });
        }
        let mut jet = state.to_vec();
        jet.push(phi.rates()[i][n]);
        let psi = log_derivatives(&jet);
        let lhs = form.evaluate(x, &psi)?;
        if !((lhs - q.eval(x, 0)?).abs() <= tol) {
            return Ok(false);
        }
        sampled += 1;
    }
    if sampled == 0 {
        return Err(Error::InvalidArgument("no trajectory samples inside the interval".into()));
    }
    Ok(true)
}
