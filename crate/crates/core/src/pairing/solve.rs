use crate::error::{Error, Result};
use crate::expr::div_exact;
use crate::ode::{solve_forced2, solve_linear1, solve_linear2, CoeffFn, Grid, Ivp, Lifter};
use crate::scalar::Scalar;

use super::lit;

/// Coefficients `(c, f)` of the first-order equation for `U`,
/// `U' + c U + f = 0`, obtained by dividing the pairing condition on `U`
/// through by `Q`:
///
/// ```text
/// c = (2Q' + 2P + KQ)/Q
/// f = [P'' + 2{λ − (P/Q)(K + P/Q)}Q' + 2λP − (P²/Q²)(2P + 3KQ)
///      − PQ''/Q + K(λQ − KP) − PK' − S]/Q
/// ```
pub fn u_equation<T: Scalar>(
    p: &CoeffFn<T>,
    q: &CoeffFn<T>,
    k: &CoeffFn<T>,
    s: &CoeffFn<T>,
    lambda: T,
) -> (CoeffFn<T>, CoeffFn<T>) {
    let mut lift = Lifter::new();
    let (p, q, k, s) = (lift.lift(p), lift.lift(q), lift.lift(k), lift.lift(s));
    let lam = lit(lambda);
    let dp = lift.diff(&p);
    let ddp = lift.diff(&dp);
    let dq = lift.diff(&q);
    let ddq = lift.diff(&dq);
    let dk = lift.diff(&k);
    let ratio = p.clone() / q.clone();
    let coeff = (2.0 * dq.clone() + 2.0 * p.clone() + k.clone() * q.clone()) / q.clone();
    let rest = ddp
        + 2.0 * (lam.clone() - ratio.clone() * (k.clone() + ratio.clone())) * dq
        + 2.0 * lam.clone() * p.clone()
        - ratio.clone() * ratio * (2.0 * p.clone() + 3.0 * k.clone() * q.clone())
        - p.clone() * ddq / q.clone()
        + k.clone() * (lam * q.clone() - k.clone() * p.clone())
        - p * dk
        - s;
    (lift.finish(coeff), lift.finish(rest / q))
}

/// Solves the pairing condition for `U` given `P, Q, K, S, λ` and `U` at
/// the IVP's initial point.
pub fn solve_u<T: Scalar>(
    p: &CoeffFn<T>,
    q: &CoeffFn<T>,
    k: &CoeffFn<T>,
    s: &CoeffFn<T>,
    lambda: T,
    ivp: &Ivp<T>,
) -> Result<CoeffFn<T>> {
    let (coeff, forcing) = u_equation(p, q, k, s, lambda);
    solve_linear1(&coeff, &forcing, ivp)
}

/// `K = y'/y` where `y'' + (3P − λ/P)y' + (S/P)y = 0` (the case `Q = 1`).
///
/// The grid stores `K' = y''/y − K²` and `K''` exactly. A zero of `y` on
/// the interval is a pole of `K` and is reported as an error.
pub fn solve_k_split<T: Scalar>(p: &CoeffFn<T>, s: &CoeffFn<T>, lambda: T, ivp: &Ivp<T>) -> Result<CoeffFn<T>> {
    let mut lift = Lifter::new();
    let (pe, se) = (lift.lift(p), lift.lift(s));
    let lam = lit(lambda);
    // exact division keeps removable 0/0 points (P and S vanishing together) finite
    let u_y = lift.finish(-div_exact(&se, &pe));
    let k_y = lift.finish(-(3.0 * pe.clone() - div_exact(&lam, &pe)));
    let traj = solve_linear2(&u_y, &k_y, T::zero(), ivp)?;

    let scale = traj.states().iter().fold(T::zero(), |m, st| m.max(st[0].abs()));
    let floor = scale * T::lit(1e-10);
    let mut prev_sign = None;
    for (x, st) in traj.xs().iter().zip(traj.states()) {
        let y = st[0];
        let sign = y > T::zero();
        if y.abs() <= floor || prev_sign.is_some_and(|s| s != sign) {
            return Err(Error::Vanishes { what: "y", x: x.as_f64() });
        }
        prev_sign = Some(sign);
    }

    let n = traj.len();
    let (mut k, mut dk, mut ddk) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut curvature_ok = true;
    for i in 0..n {
        let x = traj.xs()[i];
        let (y, dy) = (traj.state(i)[0], traj.state(i)[1]);
        let ddy = traj.rates()[i][1];
        let kk = dy / y;
        let dkk = ddy / y - kk * kk;
        k.push(kk);
        dk.push(dkk);
        // y''' = U_y' y + U_y y' + K_y' y' + K_y y''
        let third = (|| -> Result<T> {
            Ok(u_y.eval(x, 1)? * y + u_y.eval(x, 0)? * dy + k_y.eval(x, 1)? * dy + k_y.eval(x, 0)? * ddy)
        })();
        match third {
            Ok(t) => ddk.push(t / y - kk * ddy / y - T::lit(2.0) * kk * dkk),
            Err(_) => curvature_ok = false,
        }
    }
    let curvatures = curvature_ok.then_some(ddk);
    Ok(CoeffFn::grid(Grid::from_unsorted(traj.xs().to_vec(), k, dk, curvatures)?))
}

/// Solves `P'' + (2U + 2λ − K' − K²)P + K(U + λ) + U' = 0` for `P` and
/// returns it with `S = −3P²K − 2P³`.
pub fn solve_p_ansatz<T: Scalar>(
    u: &CoeffFn<T>,
    k: &CoeffFn<T>,
    lambda: T,
    ivp: &Ivp<T>,
) -> Result<(CoeffFn<T>, CoeffFn<T>)> {
    let mut lift = Lifter::new();
    let (ue, ke) = (lift.lift(u), lift.lift(k));
    let lam = lit(lambda);
    let du = lift.diff(&ue);
    let dk = lift.diff(&ke);
    let a = 2.0 * ue.clone() + 2.0 * lam.clone() - dk - ke.clone() * ke.clone();
    let f = ke * (ue + lam) + du;
    let p = CoeffFn::grid(solve_forced2(&lift.finish(a), &lift.finish(f), ivp)?);
    let s = s_from_ansatz(&p, k);
    Ok((p, s))
}

/// `S = −3P²K − 2P³`.
pub(crate) fn s_from_ansatz<T: Scalar>(p: &CoeffFn<T>, k: &CoeffFn<T>) -> CoeffFn<T> {
    let mut lift = Lifter::new();
    let (pe, ke) = (lift.lift(p), lift.lift(k));
    let p2 = pe.clone() * pe.clone();
    lift.finish(-3.0 * p2.clone() * ke - 2.0 * p2 * pe)
}
