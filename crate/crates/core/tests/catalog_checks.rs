use std::collections::BTreeMap;

use colehopf::catalog::{build_case, list_cases, PairingProblem};
use colehopf::expr::parse;
use colehopf::ode::{CoeffFn, Ivp};
use colehopf::pairing::solve_p_ansatz;
use colehopf::verify::{verify_pair, VerifyOptions};
use statrs::function::erf::erf;

fn case(name: &str, kv: &[(&str, f64)]) -> PairingProblem {
    let params = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_case(name, &params).unwrap()
}

fn sym(text: &str) -> CoeffFn<f64> {
    CoeffFn::symbolic(parse(text).unwrap())
}

fn matches(f: &CoeffFn<f64>, text: &str, interval: (f64, f64)) -> bool {
    f.equivalent(&sym(text), interval, 64, 1e-7).unwrap()
}

#[test]
fn bessel_coefficients_match_the_closed_forms() {
    let c = case("bessel0", &[]);
    assert!(matches(&c.nonlinear.s, "1/(2*x^3)", c.interval));
    assert!(matches(&c.nonlinear.v, "2 + 1/(2*x^2)", c.interval));
    assert!(matches(&c.nonlinear.w, "0", c.interval));
    assert!(matches(&c.nonlinear.r, "2", c.interval));
}

#[test]
fn painleve_coefficients_match() {
    let c = case("painleve2", &[]);
    assert!(matches(&c.nonlinear.s, "-1/2", c.interval));
    assert!(matches(&c.nonlinear.v, "x", c.interval));
    assert!(matches(&c.nonlinear.w, "0", c.interval));
    assert!(matches(&c.linear.u, "-x/2", c.interval));
    assert!(matches(&c.transform.p, "0", c.interval));
    let rep = verify_pair(&c.linear, &c.transform, &c.nonlinear, c.ivp(), &VerifyOptions::default().with_tol(1e-7))
        .unwrap();
    assert!(rep.passed, "{}", rep.max_residual);
}

#[test]
fn example1_power_law() {
    for b in [1.0, 2.0, 0.5] {
        let c = case("example1", &[("b", b)]);
        let v = format!("2*{b}*(2*{b}-1)/x^2");
        assert!(matches(&c.nonlinear.v, &v, c.interval), "b={b}");
        assert!(matches(&c.nonlinear.w, &format!("-6*{b}/x"), c.interval));
        assert!(matches(&c.nonlinear.s, "0", c.interval));
        let printed = format!("2*{b}*(2*{b}+1)/x^2");
        assert!(!matches(&c.nonlinear.v, &printed, c.interval));
    }
}

#[test]
fn example1_u_is_the_solved_u() {
    let c = case("example1", &[("b", 1.0)]);
    let u = colehopf::pairing::solve_u(
        &c.transform.p,
        &c.transform.q,
        &c.linear.k,
        &CoeffFn::zero(),
        0.0,
        &Ivp::new(1.0, 3.0, vec![2.0]),
    )
    .unwrap();
    assert!(u.equivalent(&c.linear.u, c.interval, 64, 1e-7).unwrap());
}

#[test]
fn harmonic_p_is_a_hyperbolic_cosine() {
    let c = case("harmonic", &[("omega", 1.0)]);
    assert!(matches(&c.transform.p, "2*cosh(sqrt(2)*x)", c.interval));
    let c = case("trig", &[("omega", 1.5)]);
    assert!(matches(&c.transform.p, "2*cos(sqrt(2)*1.5*x)", c.interval));
}

#[test]
fn legendre_p_matches_numeric_ansatz() {
    for n in [2.0, 3.0] {
        let c = case("legendre", &[("n", n)]);
        let m = n * (n + 1.0);
        let slope = -2.0 * m / (n * n + n - 2.0);
        let ivp = Ivp::interior(0.0, -0.8, 0.8, vec![0.0, slope]);
        let (p, _) = solve_p_ansatz(&c.linear.u, &c.linear.k, 0.0, &ivp).unwrap();
        assert!(p.equivalent(&c.transform.p, c.interval, 64, 1e-7).unwrap(), "n={n}");
    }
    let c = case("legendre", &[("n", 2.0)]);
    assert!(matches(&c.transform.p, "-3*x/(1-x^2)", c.interval));
}

#[test]
fn hermite_p_matches_the_erf_form() {
    let c = case("hermite", &[("n", 2.0)]);
    let pi = std::f64::consts::PI;
    for i in 0..=30 {
        let x = 1.5 * i as f64 / 30.0;
        let want = -8.0 * (pi * (0.25 + x * x) * (x * x).exp() * erf(x) + pi.sqrt() * x) / pi.sqrt();
        let got = c.transform.p.eval(x, 0).unwrap();
        assert!((want - got).abs() <= 1e-7 * (1.0 + want.abs()), "x={x}: {want} vs {got}");
    }
}

#[test]
fn example2_reduces_to_the_hand_oracle() {
    let c = case("example2", &[("n", 0.0)]);
    assert!(c.linear.k.equivalent(&CoeffFn::zero(), c.interval, 32, 1e-9).unwrap());
    assert!(matches(&c.linear.u, "4*x^2/9 + 2/3", c.interval));
    assert!(!matches(&c.linear.u, "exp(2*x^2/3) - 3/8*(3+2*x^2)", c.interval));
}

#[test]
fn example3_u_is_gaussian() {
    let c = case("example3", &[("a", 0.5), ("b", 0.25)]);
    assert!(matches(&c.linear.u, "exp(-(2*0.5 + 0.25*x)*x)", c.interval));
    assert!(matches(&c.nonlinear.s, "-2*(0.5+0.25*x)^3", c.interval));
}

#[test]
fn example4_particular_solutions() {
    let c = case("example4", &[("a", 2.0)]);
    assert!(matches(&c.transform.p, "2/x", c.interval));
    let c = case("example4_reversed", &[("a", 1.0)]);
    assert!(matches(&c.linear.u, "-3*(1/x^2 - 1/x + 1/2)", c.interval));
}

#[test]
fn example5_p_solves_the_ansatz_with_constant_offset() {
    let c = case("example5", &[("a", 0.5)]);
    // P = -a is the particular solution
    let ivp = Ivp::new(0.0, 1.5, vec![-0.5, 0.0]);
    let (p, _) = solve_p_ansatz(&c.linear.u, &c.linear.k, 0.0, &ivp).unwrap();
    assert!(p.equivalent(&CoeffFn::constant(-0.5), c.interval, 32, 1e-8).unwrap());
}

#[test]
fn every_case_verifies_with_three_starts() {
    assert!(list_cases().len() >= 12);
    for info in list_cases() {
        let c = build_case(info.name, &BTreeMap::new()).unwrap();
        let distinct: std::collections::BTreeSet<String> = c.ivps.iter().map(|i| format!("{:?}", i.state)).collect();
        assert_eq!(distinct.len(), 3, "{}", info.name);
        for ivp in &c.ivps {
            let rep = verify_pair(&c.linear, &c.transform, &c.nonlinear, ivp, &VerifyOptions::default()).unwrap();
            assert!(rep.passed && !rep.inconclusive, "{} {:?}: {}", info.name, ivp.state, rep.max_residual);
        }
    }
}
