mod common;

use colehopf::expr::{differentiate, Expr, Func};
use colehopf::ode::{CoeffFn, Ivp};
use colehopf::pairing::{
    solve_k_split, solve_u, synth_nonlinear, theorem_check, LinearOde, Transform, THEOREM_SAMPLES,
};
use colehopf::verify::{verify_pair, VerifyOptions};
use common::{coeffs, lift_above, poly, runner, sym};
use proptest::prelude::*;

const INTERVAL: (f64, f64) = (1.0, 2.0);

fn lambda() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.0, 1.0])
}

#[test]
fn random_pairings_verify() {
    let inputs = (coeffs(3, 2.0), coeffs(3, 2.0), coeffs(3, 2.0), coeffs(3, 2.0), lambda(), -1.0f64..1.0);
    runner(40)
        .run(&inputs, |(p, q, k, u, lam, slope)| {
            let q = lift_above(q, 0.5, INTERVAL.0, INTERVAL.1);
            let lin = LinearOde::new(sym(poly(&u)), sym(poly(&k)), lam);
            let t = Transform::new(sym(poly(&p)), sym(poly(&q)));
            let nl = synth_nonlinear(&t.p, &t.q, &lin.k, &lin.u, lam).unwrap();
            let ivp = Ivp::new(INTERVAL.0, INTERVAL.1, vec![1.0, slope]);
            let rep = verify_pair(&lin, &t, &nl, &ivp, &VerifyOptions::default()).unwrap();
            prop_assert!(rep.passed, "max {} masked {}", rep.max_residual, rep.masked);
            Ok(())
        })
        .unwrap();
}

#[test]
fn unit_q_identities() {
    let inputs = (coeffs(3, 2.0), coeffs(3, 2.0), coeffs(3, 2.0), lambda());
    runner(64)
        .run(&inputs, |(p, k, u, lam)| {
            let (p, k, u) = (poly(&p), poly(&k), poly(&u));
            let nl = synth_nonlinear(&sym(p.clone()), &CoeffFn::constant(1.0), &sym(k.clone()), &sym(u.clone()), lam)
                .unwrap();
            let eq = |a: &CoeffFn<f64>, b: Expr| a.equivalent(&sym(b), INTERVAL, 32, 1e-10).unwrap();
            prop_assert!(eq(&nl.r, Expr::c(2.0)));
            prop_assert!(eq(&nl.w, -6.0 * p.clone() - 3.0 * k.clone()));
            let dk = differentiate(&k);
            let v = 6.0 * p.clone() * (p + k.clone()) - 2.0 * u - 3.0 * lam + k.clone() * k + dk;
            prop_assert!(eq(&nl.v, v));
            Ok(())
        })
        .unwrap();
}

fn theorem_rhs(v: &Expr, w: &Expr, lam: f64) -> Expr {
    let dv = differentiate(v);
    let dw = differentiate(w);
    let ddw = differentiate(&dw);
    0.5 * (-dv + (-ddw + (v.clone() + dw + lam) * w.clone()) / 3.0 - w.clone().powi(3) / 27.0)
}

#[test]
fn theorem_round_trip() {
    let inputs = (coeffs(3, 1.0), coeffs(2, 1.0), lambda(), 0.0f64..1.0);
    runner(40)
        .run(&inputs, |(v, w, lam, wiggle)| {
            let v = poly(&v) + wiggle * Func::Sin.apply(Expr::x());
            let w = poly(&w);
            let s = theorem_rhs(&v, &w, lam);
            let (s, v, w) = (sym(s), sym(v), sym(w));
            let cert = theorem_check(&s, &v, &w, None, lam, INTERVAL, THEOREM_SAMPLES, 1e-8).unwrap();
            prop_assert!(cert.satisfied, "max delta {}", cert.max_delta);
            let (p, u, k) = (cert.p.unwrap(), cert.u.unwrap(), cert.k.unwrap());
            let nl = synth_nonlinear(&p, &CoeffFn::constant(1.0), &k, &u, lam).unwrap();
            prop_assert!(nl.s.equivalent(&s, INTERVAL, 64, 1e-8).unwrap());
            prop_assert!(nl.v.equivalent(&v, INTERVAL, 64, 1e-8).unwrap());
            prop_assert!(nl.w.equivalent(&w, INTERVAL, 64, 1e-8).unwrap());
            Ok(())
        })
        .unwrap();
}

#[test]
fn solved_u_reproduces_s() {
    let inputs = (coeffs(2, 1.0), coeffs(2, 1.0), coeffs(2, 1.0), coeffs(2, 1.0), lambda(), -1.0f64..1.0);
    runner(32)
        .run(&inputs, |(p, q, k, s, lam, u0)| {
            let q = lift_above(q, 0.5, INTERVAL.0, INTERVAL.1);
            let (p, q, k, s) = (sym(poly(&p)), sym(poly(&q)), sym(poly(&k)), sym(poly(&s)));
            let ivp = Ivp::new(INTERVAL.0, INTERVAL.1, vec![u0]);
            let u = solve_u(&p, &q, &k, &s, lam, &ivp).unwrap();
            let nl = synth_nonlinear(&p, &q, &k, &u, lam).unwrap();
            let grid = u.as_grid().unwrap();
            for (&x, &uv) in grid.nodes().iter().zip(grid.values()) {
                let (want, got) = (s.eval(x, 0).unwrap(), nl.s.eval(x, 0).unwrap());
                let scale = 1.0 + want.abs() + uv.abs();
                prop_assert!((want - got).abs() <= 10.0 * ivp.rtol * scale, "x={} {} vs {}", x, want, got);
            }
            Ok(())
        })
        .unwrap();
}

/// The full condition on `U` and `K` when `Q = 1`:
/// `U' + 2P(U + λ − P²) + P'' − S + (U + λ)K − P(K² + 3KP + K') = 0`.
fn unit_q_condition(p: &CoeffFn<f64>, s: &CoeffFn<f64>, k: &CoeffFn<f64>, u: &CoeffFn<f64>, lam: f64, x: f64) -> (f64, f64) {
    let (pv, ddp) = (p.eval(x, 0).unwrap(), p.eval(x, 2).unwrap());
    let (kv, dk) = (k.eval(x, 0).unwrap(), k.eval(x, 1).unwrap());
    let (uv, du) = (u.eval(x, 0).unwrap(), u.eval(x, 1).unwrap());
    let sv = s.eval(x, 0).unwrap();
    let terms = [
        du,
        2.0 * pv * (uv + lam - pv * pv),
        ddp,
        -sv,
        (uv + lam) * kv,
        -pv * (kv * kv + 3.0 * kv * pv + dk),
    ];
    (terms.iter().sum(), 1.0 + terms.iter().map(|t| t.abs()).sum::<f64>())
}

#[test]
fn split_and_u_satisfy_the_condition() {
    let inputs = (1.0f64..2.0, -0.5f64..0.5, coeffs(2, 1.0), lambda(), -1.0f64..1.0, -0.3f64..0.3);
    runner(24)
        .run(&inputs, |(p0, p1, s, lam, u0, dy)| {
            let (lo, hi) = (0.0, 0.5);
            let p = sym(p0 + p1 * Expr::x());
            let s = sym(poly(&s));
            let k = solve_k_split(&p, &s, lam, &Ivp::new(lo, hi, vec![1.0, dy])).unwrap();
            let u = solve_u(&p, &CoeffFn::constant(1.0), &k, &s, lam, &Ivp::new(lo, hi, vec![u0])).unwrap();
            for &x in u.as_grid().unwrap().nodes() {
                let (r, scale) = unit_q_condition(&p, &s, &k, &u, lam, x);
                prop_assert!(r.abs() <= 10.0 * 1e-10 * scale, "x={} residual {}", x, r);
            }
            Ok(())
        })
        .unwrap();
}
