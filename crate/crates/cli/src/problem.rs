//! Problem files: a pairing written out as TOML.
//!
//! ```toml
//! name = "bessel0"
//! lambda = 0.0
//!
//! [linear]
//! U = "-1"
//! K = "-1/x"
//!
//! [transform]
//! P = "1/(2*x)"
//! Q = "1"
//!
//! [domain]
//! a = 0.5
//! b = 5.0
//!
//! [ic]
//! phi = 1.0
//! dphi = 0.0
//! ```
//!
//! An optional `[nonlinear]` table with `S, V, W, R` replaces synthesis, and
//! `[params]` binds names used in the expressions.

use std::collections::BTreeMap;

use colehopf::expr::{parse, Expr};
use colehopf::ode::{CoeffFn, Ivp};
use colehopf::pairing::{synth_nonlinear, LinearOde, NonlinearOde, Transform};
use colehopf::scalar::chebyshev_nodes;
use serde::Deserialize;

use crate::CliError;

/// Points at which `Q` must be nonzero.
pub const Q_SAMPLES: usize = 64;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub lambda: f64,
    pub linear: LinearSection,
    pub transform: TransformSection,
    pub nonlinear: Option<NonlinearSection>,
    pub domain: Domain,
    pub ic: InitialValues,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

fn default_name() -> String {
    "problem".to_string()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSection {
    #[serde(rename = "U")]
    pub u: String,
    #[serde(rename = "K", default = "zero_text")]
    pub k: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "Q", default = "one_text")]
    pub q: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearSection {
    #[serde(rename = "S")]
    pub s: String,
    #[serde(rename = "V")]
    pub v: String,
    #[serde(rename = "W")]
    pub w: String,
    #[serde(rename = "R")]
    pub r: String,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialValues {
    pub phi: f64,
    pub dphi: f64,
}

fn zero_text() -> String {
    "0".to_string()
}

fn one_text() -> String {
    "1".to_string()
}

/// A problem file turned into the objects `verify_pair` takes.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub linear: LinearOde<f64>,
    pub transform: Transform<f64>,
    pub nonlinear: NonlinearOde<f64>,
    pub ivp: Ivp<f64>,
}

impl ProblemFile {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("problem file: {e}")))
    }

    /// Parses and binds every expression, checks the domain and `Q`, and
    /// synthesizes the nonlinear equation when none is given. `overrides`
    /// take precedence over `[params]`.
    pub fn build(&self, overrides: &BTreeMap<String, f64>) -> Result<Problem, CliError> {
        let mut params = self.params.clone();
        params.extend(overrides.iter().map(|(k, v)| (k.clone(), *v)));
        let (a, b) = (self.domain.a, self.domain.b);
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(CliError::Config(format!("domain needs a < b, got a = {a}, b = {b}")));
        }
        let expr = |what: &str, text: &str| -> Result<CoeffFn<f64>, CliError> {
            let e = parse(text)
                .map_err(|e| CliError::Config(format!("{what}: {e}")))?
                .bind_params(&params);
            if let Some(name) = e.params().first() {
                return Err(CliError::Config(format!("{what}: unbound parameter {name}")));
            }
            Ok(CoeffFn::symbolic(e))
        };
        let linear = LinearOde::new(expr("U", &self.linear.u)?, expr("K", &self.linear.k)?, self.lambda);
        let transform = Transform::new(expr("P", &self.transform.p)?, expr("Q", &self.transform.q)?);
        check_nonvanishing(&transform.q, (a, b))?;
        let nonlinear = match &self.nonlinear {
            Some(n) => NonlinearOde::new(expr("S", &n.s)?, expr("V", &n.v)?, expr("W", &n.w)?, expr("R", &n.r)?, self.lambda),
            None => synth_nonlinear(&transform.p, &transform.q, &linear.k, &linear.u, self.lambda)?,
        };
        Ok(Problem {
            name: self.name.clone(),
            linear,
            transform,
            nonlinear,
            ivp: Ivp::new(a, b, vec![self.ic.phi, self.ic.dphi]),
        })
    }
}

fn check_nonvanishing(q: &CoeffFn<f64>, (a, b): (f64, f64)) -> Result<(), CliError> {
    let mut sign = None;
    for x in chebyshev_nodes(a, b, Q_SAMPLES) {
        let v = q.eval(x, 0)?;
        if !v.is_finite() || v == 0.0 || sign.is_some_and(|s| s != (v > 0.0)) {
            return Err(CliError::Config(format!("Q vanishes on [{a}, {b}] (near x = {x})")));
        }
        sign = Some(v > 0.0);
    }
    Ok(())
}

/// Renders a closed-form coefficient, or describes a sampled one.
pub fn show(f: &CoeffFn<f64>) -> String {
    match f.as_expr() {
        Some(e) if f.is_symbolic() => e.to_string(),
        _ => match f.span() {
            Some((lo, hi)) => format!("<numeric on [{lo}, {hi}]>"),
            None => "<numeric>".to_string(),
        },
    }
}

pub fn parse_expr(what: &str, text: &str) -> Result<Expr, CliError> {
    parse(text).map_err(|e| CliError::Config(format!("{what}: {e}")))
}
