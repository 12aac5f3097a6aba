//! Pairings between `ψ'' = S + Vψ + Wψ² + Rψ³ + λψ` and
//! `φ'' = Uφ + Kφ' + λφ` through `ψ = P + Qφ'/φ`.

mod solve;

pub use solve::{solve_k_split, solve_p_ansatz, solve_u, u_equation};

use crate::error::{Error, Result};
use crate::expr::{Expr, Laurent};
use crate::ode::{solve_linear1, CoeffFn, Ivp, Lifter};
use crate::scalar::{chebyshev_nodes, Scalar};

/// `φ'' = Uφ + Kφ' + λφ`.
#[derive(Clone, Debug)]
pub struct LinearOde<T> {
    pub u: CoeffFn<T>,
    pub k: CoeffFn<T>,
    pub lambda: T,
}

/// `ψ'' = S + Vψ + V1ψ' + Wψ² + Rψ³ + λψ`; `V1` absent means zero.
#[derive(Clone, Debug)]
pub struct NonlinearOde<T> {
    pub s: CoeffFn<T>,
    pub v: CoeffFn<T>,
    pub w: CoeffFn<T>,
    pub r: CoeffFn<T>,
    pub v1: Option<CoeffFn<T>>,
    pub lambda: T,
}

/// `ψ = P + Q φ'/φ`.
#[derive(Clone, Debug)]
pub struct Transform<T> {
    pub p: CoeffFn<T>,
    pub q: CoeffFn<T>,
}

impl<T: Scalar> LinearOde<T> {
    pub fn new(u: CoeffFn<T>, k: CoeffFn<T>, lambda: T) -> Self {
        LinearOde { u, k, lambda }
    }
}

impl<T: Scalar> Transform<T> {
    pub fn new(p: CoeffFn<T>, q: CoeffFn<T>) -> Self {
        Transform { p, q }
    }

    /// The logarithmic derivative `ψ = φ'/φ`.
    pub fn cole_hopf() -> Self {
        Transform::new(CoeffFn::zero(), CoeffFn::constant(1.0))
    }
}

impl<T: Scalar> NonlinearOde<T> {
    pub fn new(s: CoeffFn<T>, v: CoeffFn<T>, w: CoeffFn<T>, r: CoeffFn<T>, lambda: T) -> Self {
        NonlinearOde {
            s,
            v,
            w,
            r,
            v1: None,
            lambda,
        }
    }

    pub fn with_v1(mut self, v1: CoeffFn<T>) -> Self {
        self.v1 = Some(v1);
        self
    }

    /// `ψ'' − (S + Vψ + V1ψ' + Wψ² + Rψ³ + λψ)` at `x`, together with the
    /// sum of the magnitudes of the terms (the natural scale of the
    /// residual).
    pub fn residual(&self, x: T, psi: T, dpsi: T, ddpsi: T) -> Result<(T, T)> {
        let terms = [
            self.s.eval(x, 0)?,
            self.v.eval(x, 0)? * psi,
            match &self.v1 {
                Some(v1) => v1.eval(x, 0)? * dpsi,
                None => T::zero(),
            },
            self.w.eval(x, 0)? * psi * psi,
            self.r.eval(x, 0)? * psi * psi * psi,
            self.lambda * psi,
        ];
        let rhs = terms.iter().fold(T::zero(), |acc, t| acc + *t);
        let scale = terms.iter().fold(ddpsi.abs(), |acc, t| acc + t.abs());
        Ok((ddpsi - rhs, scale))
    }
}

fn lit<T: Scalar>(v: T) -> Expr {
    Expr::Const(v.as_f64())
}

/// Nonlinear coefficients paired with `(U, K, λ)` through `(P, Q)`:
///
/// ```text
/// R = 2/Q²
/// W = −(2(Q' + 3P) + 3KQ)/Q²
/// V = (QQ'' + 4PQ' + 6P² − Q²(2U + 3λ))/Q² + K² + (6P + 2Q')K/Q + K'
/// S = 2(U+λ)Q' + QU' + P'' − WP² − VP − RP³ − λP + KQ(U+λ)
/// ```
///
/// Closed-form inputs give closed-form outputs.
pub fn synth_nonlinear<T: Scalar>(
    p: &CoeffFn<T>,
    q: &CoeffFn<T>,
    k: &CoeffFn<T>,
    u: &CoeffFn<T>,
    lambda: T,
) -> Result<NonlinearOde<T>> {
    if q.as_expr().is_some_and(Expr::is_zero) || q.as_grid().is_some_and(|g| g.values().iter().all(|v| v.is_zero())) {
        return Err(Error::InvalidArgument("Q vanishes identically".into()));
    }
    let mut lift = Lifter::new();
    let (p, q, k, u) = (lift.lift(p), lift.lift(q), lift.lift(k), lift.lift(u));
    let lam = lit(lambda);
    let dp = lift.diff(&p);
    let ddp = lift.diff(&dp);
    let dq = lift.diff(&q);
    let ddq = lift.diff(&dq);
    let dk = lift.diff(&k);
    let du = lift.diff(&u);
    let q2 = q.clone() * q.clone();

    let r = 2.0 / q2.clone();
    let w = -(2.0 * (dq.clone() + 3.0 * p.clone()) + 3.0 * k.clone() * q.clone()) / q2.clone();
    let v = (q.clone() * ddq + 4.0 * p.clone() * dq.clone() + 6.0 * p.clone() * p.clone()
        - q2.clone() * (2.0 * u.clone() + 3.0 * lam.clone()))
        / q2
        + k.clone() * k.clone()
        + (6.0 * p.clone() + 2.0 * dq.clone()) * k.clone() / q.clone()
        + dk;
    let (r, w, v) = (lift.finish(r), lift.finish(w), lift.finish(v));
    let (re, we, ve) = (lift.lift(&r), lift.lift(&w), lift.lift(&v));
    let p2 = p.clone() * p.clone();
    let s = 2.0 * (u.clone() + lam.clone()) * dq + q.clone() * du + ddp
        - we * p2.clone()
        - ve * p.clone()
        - re * p2 * p.clone()
        - lam.clone() * p
        + k * q * (u + lam);
    Ok(NonlinearOde::new(lift.finish(s), v, w, r, lambda))
}

/// Outcome of testing the intrinsic condition
/// `S = ½{−V' + ⅓[−W'' + (V + W' + λ)W] − W³/27}`.
#[derive(Clone, Debug)]
pub struct TheoremCertificate<T> {
    pub satisfied: bool,
    /// Sample points and `Δ = S − RHS` there.
    pub nodes: Vec<T>,
    pub delta: Vec<T>,
    pub max_delta: T,
    pub max_s: T,
    pub tol: T,
    /// On success: `P = −W/6`, `U = −V/2 + W²/12 − 3λ/2` and `K = 0`.
    pub p: Option<CoeffFn<T>>,
    pub u: Option<CoeffFn<T>>,
    pub k: Option<CoeffFn<T>>,
}

/// Default number of samples for [`theorem_check`].
pub const THEOREM_SAMPLES: usize = 64;
/// Default tolerance for [`theorem_check`].
pub const THEOREM_TOL: f64 = 1e-8;

/// Decides the intrinsic condition at `n` Chebyshev nodes of `interval`:
/// satisfied iff `max|Δ| ≤ tol·(1 + max|S|)`. When `r` is given it must be
/// the constant 2.
pub fn theorem_check<T: Scalar>(
    s: &CoeffFn<T>,
    v: &CoeffFn<T>,
    w: &CoeffFn<T>,
    r: Option<&CoeffFn<T>>,
    lambda: T,
    interval: (T, T),
    n: usize,
    tol: T,
) -> Result<TheoremCertificate<T>> {
    let (lo, hi) = interval;
    if !(lo < hi) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need lo < hi and n >= 2, got [{lo}, {hi}] and n = {n}"
        )));
    }
    if let Some(r) = r {
        if !r.equivalent(&CoeffFn::constant(2.0), interval, n, T::lit(1e-12))? {
            return Err(Error::InvalidArgument("the theorem requires R = 2".into()));
        }
    }
    let mut lift = Lifter::new();
    let (se, ve, we) = (lift.lift(s), lift.lift(v), lift.lift(w));
    let lam = lit(lambda);
    let dv = lift.diff(&ve);
    let dw = lift.diff(&we);
    let ddw = lift.diff(&dw);
    let w3 = we.clone() * we.clone() * we.clone();
    let rhs = 0.5 * (-dv + (-ddw + (ve.clone() + dw + lam.clone()) * we.clone()) / 3.0 - w3 / 27.0);
    let delta_fn = lift.finish(se - rhs);

    let nodes = chebyshev_nodes(lo, hi, n);
    let mut delta = Vec::with_capacity(n);
    let (mut max_delta, mut max_s) = (T::zero(), T::zero());
    for &x in &nodes {
        let d = delta_fn.eval(x, 0)?;
        max_delta = max_delta.max(d.abs());
        max_s = max_s.max(s.eval(x, 0)?.abs());
        delta.push(d);
    }
    let satisfied = max_delta <= tol * (T::one() + max_s);
    let (p, u, k) = if satisfied {
        let p = lift.finish(-(we.clone() / 6.0));
        let u = lift.finish(-(ve / 2.0) + we.clone() * we / 12.0 - 1.5 * lam);
        (Some(p), Some(u), Some(CoeffFn::zero()))
    } else {
        (None, None, None)
    };
    Ok(TheoremCertificate {
        satisfied,
        nodes,
        delta,
        max_delta,
        max_s,
        tol,
        p,
        u,
        k,
    })
}

/// Removes the `V1ψ'` term with `ξ = pψ`, `p = exp(−½∫V1)`:
///
/// ```text
/// ξ'' = pS + (V + p''/p)ξ + (W/p)ξ² + (R/p²)ξ³ + λξ
/// ```
///
/// `p` is found symbolically when `V1` is a Laurent polynomial (powers of
/// `x`, including `c/x`), otherwise by quadrature over `interval` with
/// `p(lo) = 1`.
pub fn normalize_damped<T: Scalar>(
    nl: &NonlinearOde<T>,
    interval: Option<(T, T)>,
) -> Result<(CoeffFn<T>, NonlinearOde<T>)> {
    let Some(v1) = &nl.v1 else {
        return Ok((CoeffFn::constant(1.0), nl.clone()));
    };
    let p = match v1.as_expr().and_then(Laurent::from_expr) {
        Some(series) => CoeffFn::symbolic(integrating_factor(&series)),
        None => {
            let (lo, hi) = interval.ok_or_else(|| {
                Error::InvalidArgument("a non-polynomial V1 needs an interval for quadrature".into())
            })?;
            let mut lift = Lifter::new();
            let half = lift.lift(v1) * 0.5;
            solve_linear1(&lift.finish(half), &CoeffFn::zero(), &Ivp::new(lo, hi, vec![T::one()]))?
        }
    };
    let mut lift = Lifter::new();
    let pe = lift.lift(&p);
    let ddp = {
        let d = lift.diff(&pe);
        lift.diff(&d)
    };
    let (s, v, w, r) = (lift.lift(&nl.s), lift.lift(&nl.v), lift.lift(&nl.w), lift.lift(&nl.r));
    let out = NonlinearOde::new(
        lift.finish(pe.clone() * s),
        lift.finish(v + ddp / pe.clone()),
        lift.finish(w / pe.clone()),
        lift.finish(r / (pe.clone() * pe)),
        nl.lambda,
    );
    Ok((p, out))
}

/// `exp(−½∫V1)` for a Laurent polynomial `V1`, written as `x^(−c/2)·exp(…)`
/// where `c` is the coefficient of `1/x`.
fn integrating_factor(v1: &Laurent) -> Expr {
    let log_coeff = v1.coeff(-1);
    let poly = Laurent::from_terms(
        v1.terms()
            .filter(|(k, _)| *k != -1)
            .map(|(k, c)| (k + 1, -0.5 * c / (k + 1) as f64)),
    );
    let power = match -0.5 * log_coeff {
        e if e == 0.0 => None,
        e => Some(Expr::x().pow(Expr::c(e))),
    };
    let growth = (!poly.is_zero()).then(|| poly.to_expr().exp());
    let p = match (power, growth) {
        (None, None) => Expr::c(1.0),
        (Some(a), None) | (None, Some(a)) => a,
        (Some(a), Some(b)) => a * b,
    };
    crate::expr::simplify(&p)
}
