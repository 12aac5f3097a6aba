mod common;

use colehopf::expr::{parse, Expr};
use colehopf::ode::{solve_linear2, CoeffFn, Ivp};
use colehopf::riccati::{apply_t, riccati_linearize, solve_tn_linear, tn_expand, tn_substitution_check, RiccatiSpec};
use common::{coeffs, poly, runner, sym};
use proptest::prelude::*;

/// `φ, φ', …, φ^(n+1)` with `φ = 1` from `ψ, …, ψ^(n)`, by
/// `φ^(k+1) = Σ_j C(k,j) ψ^(j) φ^(k−j)`.
fn phi_from_psi(psi: &[f64]) -> Vec<f64> {
    let mut phi = vec![1.0];
    for k in 0..psi.len() {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            acc += binom * psi[j] * phi[k - j];
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        phi.push(acc);
    }
    phi
}

#[test]
fn unit_operator_matches_log_derivative_oracle() {
    let one = CoeffFn::<f64>::constant(1.0);
    let zero = CoeffFn::zero();
    for n in 1..=4 {
        let form = tn_expand(n, &one, &zero).unwrap();
        runner(50)
            .run(&(prop::collection::vec(-2.0f64..2.0, n + 1), 0.0f64..2.0), |(psi, x)| {
                let want = phi_from_psi(&psi)[n + 1];
                let got = form.evaluate(x, &psi).unwrap();
                prop_assert!((want - got).abs() <= 1e-10 * (1.0 + want.abs()), "n={} {} vs {}", n, want, got);
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn expansion_is_iterated_operator() {
    let inputs = (coeffs(2, 1.0), coeffs(2, 1.0), prop::collection::vec(-2.0f64..2.0, 5), 0.0f64..2.0);
    runner(40)
        .run(&inputs, |(a, b, psi, x)| {
            let (a, b) = (sym(poly(&a)), sym(poly(&b)));
            for n in 2..=4 {
                let direct = tn_expand(n, &a, &b).unwrap();
                let stepped = apply_t(&tn_expand(n - 1, &a, &b).unwrap(), &a, &b).unwrap();
                prop_assert_eq!(direct.order, n);
                let (u, v) = (direct.evaluate(x, &psi).unwrap(), stepped.evaluate(x, &psi).unwrap());
                prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn second_power_closed_form() {
    let one = CoeffFn::<f64>::constant(1.0);
    let form = tn_expand(2, &one, &CoeffFn::zero()).unwrap();
    let want = parse("psi2 + 3*psi0*psi1 + psi0^3").unwrap();
    runner(100)
        .run(&(prop::collection::vec(-3.0f64..3.0, 3), -2.0f64..2.0), |(psi, x)| {
            let w = colehopf::expr::evaluate_with::<f64>(&want, x, &|name| match name {
                "psi0" => Some(psi[0]),
                "psi1" => Some(psi[1]),
                "psi2" => Some(psi[2]),
                _ => None,
            })
            .unwrap();
            let g = form.evaluate(x, &psi).unwrap();
            prop_assert!((w - g).abs() <= 1e-10 * (1.0 + w.abs()));
            Ok(())
        })
        .unwrap();
}

#[test]
fn substitution_holds_for_random_q() {
    for n in 1..=3 {
        let inputs = (coeffs(2, 1.0), prop::collection::vec(-0.5f64..0.5, n));
        runner(5)
            .run(&inputs, |(q, rest)| {
                let q = sym(poly(&q) + 0.3 * colehopf::expr::Func::Cos.apply(Expr::x()));
                let mut state = vec![1.0];
                state.extend(rest);
                let traj = solve_tn_linear(n, &q, &Ivp::new(0.0, 0.5, state)).unwrap();
                prop_assert!(tn_substitution_check(n, &q, &traj, (0.0, 0.5), 1e-7).unwrap());
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn unit_lead_is_classical_cole_hopf() {
    let inputs = (coeffs(2, 1.0), coeffs(2, 1.0), -0.5f64..0.5);
    runner(16)
        .run(&inputs, |(b, c1, slope)| {
            let spec = RiccatiSpec::new(CoeffFn::constant(1.0), sym(poly(&b)), sym(poly(&c1)));
            let lin = riccati_linearize(&spec);
            let (u, k) = lin.explicit();
            // φ'' = Uφ + Kφ' must be φ'' + Bφ' + C1φ = 0
            for x in [0.0, 0.3, 0.7, 1.0] {
                let (bv, cv) = (spec.b.eval(x, 0).unwrap(), spec.c1.eval(x, 0).unwrap());
                prop_assert!((u.eval(x, 0).unwrap() + cv).abs() < 1e-12);
                prop_assert!((k.eval(x, 0).unwrap() + bv).abs() < 1e-12);
            }
            let traj = solve_linear2(&u, &k, 0.0, &Ivp::new(0.0, 1.0, vec![1.0, slope])).unwrap();
            for (i, &x) in traj.xs().iter().enumerate() {
                let (phi, dphi) = (traj.state(i)[0], traj.state(i)[1]);
                let ddphi = traj.rates()[i][1];
                let psi = dphi / phi;
                let dpsi = ddphi / phi - psi * psi;
                let r = spec.residual(x, psi, dpsi).unwrap();
                prop_assert!(r.abs() < 1e-8, "x={} residual {}", x, r);
            }
            Ok(())
        })
        .unwrap();
}
