//! Registry of worked pairings. Every nonlinear equation here is produced by
//! [`synth_nonlinear`]; nothing is copied in by hand.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::ode::{CoeffFn, Ivp};
use crate::pairing::{
    solve_k_split, solve_p_ansatz, solve_u, synth_nonlinear, theorem_check, LinearOde, NonlinearOde, Transform,
    THEOREM_SAMPLES, THEOREM_TOL,
};

/// A linear equation, a transform and the nonlinear equation they pair,
/// with a domain and initial values known to verify.
#[derive(Clone, Debug)]
pub struct PairingProblem {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub linear: LinearOde<f64>,
    pub transform: Transform<f64>,
    pub nonlinear: NonlinearOde<f64>,
    pub interval: (f64, f64),
    /// Initial values for `φ` (the first is the recommended one).
    pub ivps: Vec<Ivp<f64>>,
    pub notes: String,
}

impl PairingProblem {
    pub fn ivp(&self) -> &Ivp<f64> {
        &self.ivps[0]
    }
}

/// Registry entry: name, parameters with their defaults, one-line summary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaseInfo {
    pub name: &'static str,
    pub params: &'static [(&'static str, f64)],
    pub summary: &'static str,
}

const CASES: &[CaseInfo] = &[
    CaseInfo { name: "harmonic", params: &[("omega", 1.0)], summary: "phi'' = -omega^2 phi, exponential P" },
    CaseInfo { name: "trig", params: &[("omega", 1.0)], summary: "phi'' = omega^2 phi, trigonometric P" },
    CaseInfo { name: "straightline", params: &[], summary: "phi'' = 0, linear P" },
    CaseInfo { name: "legendre", params: &[("n", 2.0)], summary: "Legendre equation of degree n >= 2" },
    CaseInfo { name: "bessel0", params: &[], summary: "Bessel equation of order 0, P = 1/(2x)" },
    CaseInfo { name: "hermite", params: &[("n", 2.0)], summary: "Hermite equation, even n, numeric P" },
    CaseInfo { name: "laguerre", params: &[("n", 2.0)], summary: "Laguerre equation, numeric P" },
    CaseInfo { name: "painleve2", params: &[], summary: "Painleve II with the Airy equation" },
    CaseInfo { name: "example1", params: &[("b", 1.0)], summary: "P = b/x, S = 0, power-law U" },
    CaseInfo { name: "example2", params: &[("n", 2.0)], summary: "P = -2x/3, S = -4nx/3, K from Hermite polynomials" },
    CaseInfo { name: "example3", params: &[("a", 0.5), ("b", 0.5)], summary: "P = a + bx, S = -2P^3, K = 0" },
    CaseInfo { name: "example4", params: &[("a", 2.0)], summary: "U = -a/x^2, S = -2P^3, K = 0" },
    CaseInfo { name: "example4_reversed", params: &[("a", 1.0)], summary: "P = -a/x^2, S = -2P^3, K = 0" },
    CaseInfo { name: "example5", params: &[("a", 0.5)], summary: "U = 2exp(2ax), S = -2P^3, K = 0" },
];

/// The fixed case registry.
pub fn list_cases() -> &'static [CaseInfo] {
    CASES
}

/// Builds a registered case. Missing parameters take their defaults;
/// unknown ones are rejected.
pub fn build_case(name: &str, params: &BTreeMap<String, f64>) -> Result<PairingProblem> {
    let info = CASES
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownCase(name.to_string()))?;
    let mut values: BTreeMap<String, f64> = info.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in params {
        if !values.contains_key(k) {
            return Err(Error::InvalidParameter(format!("case {name} has no parameter {k}")));
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{k} must be finite")));
        }
        values.insert(k.clone(), *v);
    }
    let get = |k: &str| values[k];
    let built = match name {
        "harmonic" => harmonic(get("omega"), -1.0)?,
        "trig" => harmonic(get("omega"), 1.0)?,
        "straightline" => straightline()?,
        "legendre" => legendre(integer(&values, "n", 2)?)?,
        "bessel0" => bessel0()?,
        "hermite" => hermite(even(&values, "n")?)?,
        "laguerre" => laguerre(integer(&values, "n", 1)?)?,
        "painleve2" => painleve2()?,
        "example1" => example1(get("b"))?,
        "example2" => example2(even(&values, "n")?)?,
        "example3" => example3(get("a"), get("b"))?,
        "example4" => example4(get("a"))?,
        "example4_reversed" => example4_reversed(get("a"))?,
        "example5" => example5(get("a"))?,
        _ => unreachable!("registry and builders disagree on {name}"),
    };
    Ok(PairingProblem {
        name: name.to_string(),
        params: values,
        ..PairingProblem::from(built)
    })
}

struct Built {
    linear: LinearOde<f64>,
    transform: Transform<f64>,
    nonlinear: NonlinearOde<f64>,
    interval: (f64, f64),
    ivps: Vec<Ivp<f64>>,
    notes: String,
}

impl From<Built> for PairingProblem {
    fn from(b: Built) -> Self {
        PairingProblem {
            name: String::new(),
            params: BTreeMap::new(),
            linear: b.linear,
            transform: b.transform,
            nonlinear: b.nonlinear,
            interval: b.interval,
            ivps: b.ivps,
            notes: b.notes,
        }
    }
}

fn integer(values: &BTreeMap<String, f64>, k: &str, min: i64) -> Result<i64> {
    let v = values[k];
    if v.fract() != 0.0 || v < min as f64 || v > 40.0 {
        return Err(Error::InvalidParameter(format!("{k} must be an integer in [{min}, 40], got {v}")));
    }
    Ok(v as i64)
}

fn even(values: &BTreeMap<String, f64>, k: &str) -> Result<i64> {
    let n = integer(values, k, 0)?;
    if n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("{k} must be even, got {n}")));
    }
    Ok(n)
}

fn sym(e: Expr) -> CoeffFn<f64> {
    CoeffFn::symbolic(e)
}

fn x() -> Expr {
    Expr::x()
}

fn starts(a: f64, b: f64, states: &[[f64; 2]]) -> Vec<Ivp<f64>> {
    states.iter().map(|s| Ivp::new(a, b, s.to_vec())).collect()
}

fn assemble(
    linear: LinearOde<f64>,
    p: CoeffFn<f64>,
    interval: (f64, f64),
    ivps: Vec<Ivp<f64>>,
    notes: &str,
) -> Result<Built> {
    let transform = Transform::new(p, CoeffFn::constant(1.0));
    let nonlinear = synth_nonlinear(&transform.p, &transform.q, &linear.k, &linear.u, linear.lambda)?;
    Ok(Built {
        linear,
        transform,
        nonlinear,
        interval,
        ivps,
        notes: notes.to_string(),
    })
}

fn nonzero(v: f64, what: &str) -> Result<f64> {
    if v == 0.0 {
        return Err(Error::InvalidParameter(format!("{what} must be nonzero")));
    }
    Ok(v)
}

/// `sign = -1`: exponential `P`, oscillating `φ`; `sign = +1` the reverse.
fn harmonic(omega: f64, sign: f64) -> Result<Built> {
    let omega = nonzero(omega, "omega")?;
    let (a, b) = (0.0, 2.0);
    let lin = LinearOde::new(CoeffFn::constant(sign * omega * omega), CoeffFn::zero(), 0.0);
    let (p, _) = solve_p_ansatz(&lin.u, &lin.k, 0.0, &Ivp::new(a, b, vec![2.0, 0.0]))?;
    let ivps = starts(a, b, &[[1.0, 0.0], [0.0, omega], [1.0, 0.5 * omega]]);
    let notes = if sign < 0.0 {
        "P solves P'' + 2UP = 0 from P(0) = 2, P'(0) = 0, i.e. 2cosh(sqrt(2) omega x); S = -2P^3"
    } else {
        "P solves P'' + 2UP = 0 from P(0) = 2, P'(0) = 0, i.e. 2cos(sqrt(2) omega x); S = -2P^3"
    };
    assemble(lin, p, (a, b), ivps, notes)
}

fn straightline() -> Result<Built> {
    let lin = LinearOde::new(CoeffFn::zero(), CoeffFn::zero(), 0.0);
    let p = sym(1.0 + 0.5 * x());
    let ivps = starts(0.0, 2.0, &[[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
    assemble(lin, p, (0.0, 2.0), ivps, "U = K = 0 so P is any straight line; P = 1 + x/2, S = -2P^3")
}

/// Coefficients of the degree-`n` member of a three-term polynomial
/// family, lowest power first.
fn recurrence(n: i64, p0: Vec<f64>, p1: Vec<f64>, step: impl Fn(i64, &[f64], &[f64]) -> Vec<f64>) -> Vec<f64> {
    if n == 0 {
        return p0;
    }
    let (mut prev, mut cur) = (p0, p1);
    for k in 1..n {
        let next = step(k, &cur, &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn shift_add(a: f64, p: &[f64], b: f64, q: &[f64], d: f64, r: &[f64]) -> Vec<f64> {
    // a·x·p + b·q + d·r
    let len = (p.len() + 1).max(q.len()).max(r.len());
    let mut out = vec![0.0; len];
    for (i, v) in p.iter().enumerate() {
        out[i + 1] += a * v;
    }
    for (i, v) in q.iter().enumerate() {
        out[i] += b * v;
    }
    for (i, v) in r.iter().enumerate() {
        out[i] += d * v;
    }
    out
}

fn hermite_poly(n: i64) -> Vec<f64> {
    recurrence(n, vec![1.0], vec![0.0, 2.0], |k, cur, prev| {
        shift_add(2.0, cur, 0.0, &[], -2.0 * k as f64, prev)
    })
}

fn legendre_poly(n: i64) -> Vec<f64> {
    recurrence(n, vec![1.0], vec![0.0, 1.0], |k, cur, prev| {
        let k = k as f64;
        shift_add((2.0 * k + 1.0) / (k + 1.0), cur, 0.0, &[], -k / (k + 1.0), prev)
    })
}

fn laguerre_poly(n: i64) -> Vec<f64> {
    recurrence(n, vec![1.0], vec![1.0, -1.0], |k, cur, prev| {
        let k = k as f64;
        shift_add(-1.0 / (k + 1.0), cur, (2.0 * k + 1.0) / (k + 1.0), cur, -k / (k + 1.0), prev)
    })
}

/// Value and derivative of a polynomial at `x`.
fn poly_jet(coeffs: &[f64], x: f64) -> [f64; 2] {
    coeffs.iter().rev().fold([0.0, 0.0], |[v, d], a| [v * x + a, d * x + v])
}

fn legendre(n: i64) -> Result<Built> {
    let nf = n as f64;
    let m = nf * (nf + 1.0);
    let (a, b) = (-0.8, 0.8);
    let den = 1.0 - x() * x();
    let lin = LinearOde::new(sym(-m / den.clone()), sym(2.0 * x() / den.clone()), 0.0);
    let p = sym(-2.0 * m * x() / ((nf * nf + nf - 2.0) * den));
    check_ansatz(&p, &lin, (a, b))?;
    let first = poly_jet(&legendre_poly(n), 0.0);
    let second = if first[0] != 0.0 { [0.0, 1.0] } else { [1.0, 0.0] };
    let ivps = [first, second, [1.0, 1.0]]
        .iter()
        .map(|s| Ivp::interior(0.0, a, b, s.to_vec()))
        .collect();
    assemble(
        lin,
        p,
        (a, b),
        ivps,
        "closed-form rational P, checked against the linear ansatz equation on the interval; S = -3P^2K - 2P^3",
    )
}

/// Confirms that a closed-form `P` solves
/// `P'' + (2U + 2λ − K' − K²)P + K(U + λ) + U' = 0`.
fn check_ansatz(p: &CoeffFn<f64>, lin: &LinearOde<f64>, (a, b): (f64, f64)) -> Result<()> {
    let lam = lin.lambda;
    for i in 0..=32 {
        let t = a + (b - a) * i as f64 / 32.0;
        let (u, du) = (lin.u.eval(t, 0)?, lin.u.eval(t, 1)?);
        let (k, dk) = (lin.k.eval(t, 0)?, lin.k.eval(t, 1)?);
        let (pv, ddp) = (p.eval(t, 0)?, p.eval(t, 2)?);
        let r = ddp + (2.0 * u + 2.0 * lam - dk - k * k) * pv + k * (u + lam) + du;
        let scale = 1.0 + ddp.abs() + (2.0 * u * pv).abs() + (k * u).abs() + du.abs();
        if r.abs() > 1e-9 * scale {
            return Err(Error::Degenerate);
        }
    }
    Ok(())
}

// J0, J1, Y0, Y1 at 1/2.
const J0_HALF: f64 = 0.938_469_807_240_813;
const J1_HALF: f64 = 0.242_268_457_674_874;
const Y0_HALF: f64 = -0.444_518_733_506_707;
const Y1_HALF: f64 = -1.471_472_392_670_243;

fn bessel0() -> Result<Built> {
    let (a, b) = (0.5, 5.0);
    let lin = LinearOde::new(CoeffFn::constant(-1.0), sym(-1.0 / x()), 0.0);
    let p = sym(0.5 / x());
    let ivps = starts(a, b, &[[1.0, 0.0], [J0_HALF, -J1_HALF], [Y0_HALF, -Y1_HALF]]);
    assemble(lin, p, (a, b), ivps, "special solution P = 1/(2x); S = -3P^2K - 2P^3")
}

fn hermite(n: i64) -> Result<Built> {
    let (a, b) = (0.0, 1.5);
    let lin = LinearOde::new(CoeffFn::constant(-2.0 * n as f64), sym(2.0 * x()), 0.0);
    let (p, _) = solve_p_ansatz(&lin.u, &lin.k, 0.0, &Ivp::new(a, b, vec![0.0, -12.0]))?;
    let first = poly_jet(&hermite_poly(n), 0.0);
    let ivps = starts(a, b, &[first, [0.0, 1.0], [1.0, 1.0]]);
    assemble(
        lin,
        p,
        (a, b),
        ivps,
        "P integrated from the linear ansatz equation with P(0) = 0, P'(0) = -12; printed erf forms not used",
    )
}

fn laguerre(n: i64) -> Result<Built> {
    let (a, b) = (0.5, 3.0);
    let lin = LinearOde::new(sym(-(n as f64) / x()), sym((x() - 1.0) / x()), 0.0);
    let (p, _) = solve_p_ansatz(&lin.u, &lin.k, 0.0, &Ivp::new(a, b, vec![1.0, 0.0]))?;
    let first = poly_jet(&laguerre_poly(n), a);
    let ivps = starts(a, b, &[first, [1.0, 0.0], [0.0, 1.0]]);
    assemble(
        lin,
        p,
        (a, b),
        ivps,
        "P integrated from the linear ansatz equation with P(1/2) = 1, P'(1/2) = 0; printed closed form not used",
    )
}

// Ai, Ai', Bi, Bi' at 0.
const AI0: f64 = 0.355_028_053_887_817;
const DAI0: f64 = -0.258_819_403_792_807;
const BI0: f64 = 0.614_926_627_446_001;
const DBI0: f64 = 0.448_288_357_353_826;

fn painleve2() -> Result<Built> {
    let (a, b) = (0.0, 2.0);
    let (s, v, w) = (CoeffFn::constant(-0.5), sym(x()), CoeffFn::zero());
    let cert = theorem_check(&s, &v, &w, None, 0.0, (a, b), THEOREM_SAMPLES, THEOREM_TOL)?;
    let (Some(p), Some(u), Some(k)) = (cert.p, cert.u, cert.k) else {
        return Err(Error::Degenerate);
    };
    let lin = LinearOde::new(u, k, 0.0);
    let scale = -(2f64.powf(-1.0 / 3.0));
    let ivps = starts(a, b, &[[AI0, scale * DAI0], [BI0, scale * DBI0], [1.0, 1.0]]);
    assemble(
        lin,
        p,
        (a, b),
        ivps,
        "S = -1/2, V = x, W = 0 pass the intrinsic condition; P, U, K taken from the certificate",
    )
}

fn example1(b: f64) -> Result<Built> {
    let (lo, hi) = (1.0, 3.0);
    let lin = LinearOde::new(sym(b * (b + 1.0) / (x() * x())), CoeffFn::zero(), 0.0);
    let p = sym(b / x());
    let ivps = starts(lo, hi, &[[1.0, 0.5], [1.0, b + 1.0], [1.0, -b]]);
    assemble(
        lin,
        p,
        (lo, hi),
        ivps,
        "S = 0, K = 0 gives U = b(b+1)/x^2 with the homogeneous part dropped; synthesis yields V = 2b(2b-1)/x^2",
    )
}

fn first_positive_root(coeffs: &[f64]) -> Option<f64> {
    let f = |t: f64| poly_jet(coeffs, t)[0];
    let (mut lo, step) = (1e-9, 1e-3);
    while lo < 20.0 {
        let hi = lo + step;
        if f(lo).signum() != f(hi).signum() {
            let (mut l, mut h) = (lo, hi);
            for _ in 0..60 {
                let m = 0.5 * (l + h);
                if f(l).signum() == f(m).signum() {
                    l = m;
                } else {
                    h = m;
                }
            }
            return Some(0.5 * (l + h));
        }
        lo = hi;
    }
    None
}

fn example2(n: i64) -> Result<Built> {
    let h = hermite_poly(n);
    let hi = first_positive_root(&h).map_or(2.0, |r| (0.85 * r).min(2.0));
    let (a, b) = (0.0, hi);
    let p = sym(-2.0 / 3.0 * x());
    let s = sym(-4.0 * n as f64 / 3.0 * x());
    let y0 = poly_jet(&h, 0.0);
    let k = solve_k_split(&p, &s, 0.0, &Ivp::new(a, b, y0.to_vec()))?;
    let u = solve_u(&p, &CoeffFn::constant(1.0), &k, &s, 0.0, &Ivp::new(a, b, vec![2.0 / 3.0]))?;
    let lin = LinearOde::new(u, k, 0.0);
    let ivps = starts(a, b, &[[1.0, 0.0], [1.0, -1.0], [0.0, 1.0]]);
    assemble(
        lin,
        p,
        (a, b),
        ivps,
        "K = H_n'/H_n from the split with y(0) = H_n(0); U integrated from U(0) = 2/3; printed U0 not used",
    )
}

fn example3(a: f64, b: f64) -> Result<Built> {
    let (lo, hi) = (0.0, 2.0);
    let p = sym(a + b * x());
    let s = sym(-2.0 * (a + b * x()).powi(3));
    let k = CoeffFn::zero();
    let u = solve_u(&p, &CoeffFn::constant(1.0), &k, &s, 0.0, &Ivp::new(lo, hi, vec![1.0]))?;
    let lin = LinearOde::new(u, k, 0.0);
    let ivps = starts(lo, hi, &[[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    assemble(lin, p, (lo, hi), ivps, "U integrated from U(0) = 1, matching exp(-2ax - bx^2)")
}

fn example4(a: f64) -> Result<Built> {
    let (lo, hi) = (1.0, 3.0);
    let lin = LinearOde::new(sym(-a / (x() * x())), CoeffFn::zero(), 0.0);
    let start = if a != 1.0 {
        let c0 = a / (a - 1.0);
        vec![c0, -c0]
    } else {
        vec![1.0, 0.0]
    };
    let (p, _) = solve_p_ansatz(&lin.u, &lin.k, 0.0, &Ivp::new(lo, hi, start))?;
    let ivps = starts(lo, hi, &[[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    assemble(
        lin,
        p,
        (lo, hi),
        ivps,
        "P integrated from P'' + 2UP + U' = 0 starting on the particular solution a/((a-1)x); S = -2P^3",
    )
}

fn example4_reversed(a: f64) -> Result<Built> {
    let a = nonzero(a, "a")?;
    let (lo, hi) = (1.0, 3.0);
    let p = sym(-a / (x() * x()));
    let s = sym(2.0 * (a / (x() * x())).powi(3));
    let k = CoeffFn::zero();
    let u0 = -3.0 * (1.0 - 1.0 / a + 0.5 / (a * a));
    let u = solve_u(&p, &CoeffFn::constant(1.0), &k, &s, 0.0, &Ivp::new(lo, hi, vec![u0]))?;
    let lin = LinearOde::new(u, k, 0.0);
    let ivps = starts(lo, hi, &[[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    assemble(
        lin,
        p,
        (lo, hi),
        ivps,
        "U integrated from the particular value at x = 1, matching -3(1/x^2 - 1/(ax) + 1/(2a^2)); S = -2P^3",
    )
}

fn example5(a: f64) -> Result<Built> {
    let (lo, hi) = (0.0, 1.5);
    let lin = LinearOde::new(sym(2.0 * (2.0 * a * x()).exp()), CoeffFn::zero(), 0.0);
    let (p, _) = solve_p_ansatz(&lin.u, &lin.k, 0.0, &Ivp::new(lo, hi, vec![1.0, 0.0]))?;
    let ivps = starts(lo, hi, &[[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    assemble(
        lin,
        p,
        (lo, hi),
        ivps,
        "P integrated from P'' + 2UP + U' = 0 with P(0) = 1, P'(0) = 0; it equals -a plus Bessel functions of 2exp(ax)/a",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{verify_pair, VerifyOptions};

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn registry_contents() {
        let names: Vec<_> = list_cases().iter().map(|c| c.name).collect();
        assert!(names.contains(&"painleve2"));
        assert!(names.contains(&"bessel0"));
        assert!(names.len() >= 12);
    }

    #[test]
    fn bad_names_and_parameters() {
        assert!(matches!(build_case("nope", &BTreeMap::new()), Err(Error::UnknownCase(_))));
        assert!(matches!(build_case("legendre", &params(&[("n", 1.0)])), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_case("hermite", &params(&[("n", 3.0)])), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_case("harmonic", &params(&[("omega", 0.0)])), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_case("bessel0", &params(&[("n", 0.0)])), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn polynomial_families() {
        assert_eq!(hermite_poly(2), vec![-2.0, 0.0, 4.0]);
        assert_eq!(hermite_poly(3), vec![0.0, -12.0, 0.0, 8.0]);
        let p2 = legendre_poly(2);
        assert!((p2[0] + 0.5).abs() < 1e-15 && (p2[2] - 1.5).abs() < 1e-15);
        let l2 = laguerre_poly(2);
        assert!((l2[0] - 1.0).abs() < 1e-15 && (l2[1] + 2.0).abs() < 1e-15 && (l2[2] - 0.5).abs() < 1e-15);
        assert_eq!(poly_jet(&[1.0, 2.0, 3.0], 2.0), [17.0, 14.0]);
        let r = first_positive_root(&hermite_poly(2)).unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn every_case_verifies() {
        for info in list_cases() {
            let case = build_case(info.name, &BTreeMap::new()).unwrap();
            assert_eq!(case.ivps.len(), 3);
            for ivp in &case.ivps {
                let rep = verify_pair(&case.linear, &case.transform, &case.nonlinear, ivp, &VerifyOptions::default())
                    .unwrap();
                assert!(
                    rep.passed,
                    "{} from {:?}: max {} masked {}",
                    info.name, ivp.state, rep.max_residual, rep.masked
                );
            }
        }
    }
}
