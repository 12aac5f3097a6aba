use std::collections::BTreeMap;

use super::{simplify, Expr};

/// A finite Laurent polynomial `Σ c_k x^k` with integer `k`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Laurent {
    terms: BTreeMap<i32, f64>,
}

impl Laurent {
    pub fn constant(c: f64) -> Self {
        Laurent::monomial(c, 0)
    }

    pub fn monomial(c: f64, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(k, c);
        }
        Laurent { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, f64)>) -> Self {
        terms
            .into_iter()
            .fold(Laurent::default(), |acc, (k, c)| acc.add(&Laurent::monomial(c, k), 1.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: i32) -> f64 {
        self.terms.get(&k).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    /// `(c, k)` when this is a single nonzero term.
    pub fn as_monomial(&self) -> Option<(f64, i32)> {
        match self.terms.len() {
            1 => self.terms.iter().next().map(|(k, c)| (*c, *k)),
            _ => None,
        }
    }

    fn add(&self, other: &Laurent, sign: f64) -> Laurent {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            *terms.entry(*k).or_insert(0.0) += sign * c;
        }
        terms.retain(|_, c| *c != 0.0);
        Laurent { terms }
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        let mut terms = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                *terms.entry(ka + kb).or_insert(0.0) += ca * cb;
            }
        }
        terms.retain(|_, c: &mut f64| *c != 0.0);
        Laurent { terms }
    }

    fn scale_shift(&self, factor: f64, shift: i32) -> Laurent {
        Laurent {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k + shift, c * factor))
                .collect(),
        }
    }

    /// Recognizes expressions built from constants, `x`, `+ - *`, division
    /// by a monomial and integer powers. Parameters are not recognized.
    pub fn from_expr(e: &Expr) -> Option<Laurent> {
        Some(match e {
            Expr::Const(c) => Laurent::constant(*c),
            Expr::Pi => Laurent::constant(std::f64::consts::PI),
            Expr::Var => Laurent::monomial(1.0, 1),
            Expr::Neg(a) => Laurent::from_expr(a)?.scale_shift(-1.0, 0),
            Expr::Add(a, b) => Laurent::from_expr(a)?.add(&Laurent::from_expr(b)?, 1.0),
            Expr::Sub(a, b) => Laurent::from_expr(a)?.add(&Laurent::from_expr(b)?, -1.0),
            Expr::Mul(a, b) => Laurent::from_expr(a)?.mul(&Laurent::from_expr(b)?),
            Expr::Div(a, b) => Laurent::from_expr(a)?.div_monomial(&Laurent::from_expr(b)?)?,
            Expr::Pow(a, b) => {
                let n = b.as_const().filter(|n| n.fract() == 0.0 && n.abs() <= 64.0)? as i32;
                let base = Laurent::from_expr(a)?;
                if n < 0 {
                    let (c, k) = base.as_monomial()?;
                    Laurent::monomial(c.powi(n), k * n)
                } else {
                    (0..n).fold(Laurent::constant(1.0), |acc, _| acc.mul(&base))
                }
            }
            Expr::Param(_) | Expr::Call(..) => return None,
        })
    }

    /// Exact division by a single-term divisor.
    pub fn div_monomial(&self, divisor: &Laurent) -> Option<Laurent> {
        let (c, k) = divisor.as_monomial()?;
        Some(Laurent {
            terms: self.terms.iter().map(|(j, a)| (j - k, a / c)).collect(),
        })
    }

    pub fn to_expr(&self) -> Expr {
        let mut acc: Option<Expr> = None;
        for (k, c) in self.terms.iter().rev() {
            let power = match k {
                0 => None,
                1 => Some(Expr::Var),
                _ => Some(Expr::Var.powi(*k)),
            };
            let term = match power {
                None => Expr::Const(*c),
                Some(p) if *c == 1.0 => p,
                Some(p) => Expr::Const(*c) * p,
            };
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        simplify(&acc.unwrap_or(Expr::Const(0.0)))
    }
}

/// `a / b`, performed exactly when both sides are Laurent polynomials and
/// `b` is a single term (so removable `0/0` points disappear); otherwise a
/// plain quotient node.
pub fn div_exact(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() {
        return Expr::Const(0.0);
    }
    match (Laurent::from_expr(a), Laurent::from_expr(b)) {
        (Some(num), Some(den)) => match num.div_monomial(&den) {
            Some(q) => q.to_expr(),
            None => simplify(&(a / b)),
        },
        _ => simplify(&(a / b)),
    }
}

/// Antiderivative of a Laurent polynomial, as an expression. The `1/x`
/// term integrates to `c·ln(x)`, so the result is valid for `x > 0`.
pub fn antiderivative(p: &Laurent) -> Expr {
    let mut poly = Laurent::default();
    for (k, c) in p.terms() {
        if k != -1 {
            poly = poly.add(&Laurent::monomial(c / (k + 1) as f64, k + 1), 1.0);
        }
    }
    let log_coeff = p.coeff(-1);
    let base = poly.to_expr();
    if log_coeff == 0.0 {
        base
    } else {
        simplify(&(base + Expr::Const(log_coeff) * Expr::Var.ln()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, parse, Bindings};

    fn lp(text: &str) -> Option<Laurent> {
        Laurent::from_expr(&parse(text).unwrap())
    }

    #[test]
    fn recognizes_polynomials_and_reciprocals() {
        let p = lp("(x+1)^2 - 2/x").unwrap();
        assert_eq!(p.coeff(2), 1.0);
        assert_eq!(p.coeff(1), 2.0);
        assert_eq!(p.coeff(0), 1.0);
        assert_eq!(p.coeff(-1), -2.0);
        assert!(lp("sin(x)").is_none());
        assert!(lp("1/(x+1)").is_none());
        assert!(lp("b*x").is_none());
    }

    #[test]
    fn exact_division_removes_the_removable_point() {
        let q = div_exact(&parse("-4*2*x/3").unwrap(), &parse("-2*x/3").unwrap());
        assert_eq!(q, Expr::Const(4.0));
        let v: f64 = evaluate(&q, &Bindings::at(0.0)).unwrap();
        assert_eq!(v, 4.0);
        // non-monomial divisor falls back to a quotient
        assert!(matches!(div_exact(&Expr::Var, &parse("x+1").unwrap()), Expr::Div(..)));
    }

    #[test]
    fn antiderivative_with_log_term() {
        let f = antiderivative(&lp("3*x^2 - 2/x").unwrap());
        for x in [0.5, 1.0, 3.0] {
            let v: f64 = evaluate(&f, &Bindings::at(x)).unwrap();
            assert!((v - (x * x * x - 2.0 * x.ln())).abs() < 1e-13);
        }
    }
}
