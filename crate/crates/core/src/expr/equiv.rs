use std::collections::BTreeMap;

use super::{evaluate_with, Expr};
use crate::error::{Error, Result};
use crate::scalar::chebyshev_nodes;

/// Numeric equality test: true iff `|a − b| ≤ reltol·(1 + max(|a|, |b|))` at
/// `n` Chebyshev nodes of `interval`. Evaluation failures are returned, not
/// treated as a mismatch.
pub fn equivalent(
    a: &Expr,
    b: &Expr,
    interval: (f64, f64),
    n: usize,
    reltol: f64,
    params: &BTreeMap<String, f64>,
) -> Result<bool> {
    let (lo, hi) = interval;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two sample points".into()));
    }
    let lookup = |name: &str| params.get(name).copied();
    for x in chebyshev_nodes(lo, hi, n) {
        let va: f64 = evaluate_with(a, x, &lookup)?;
        let vb: f64 = evaluate_with(b, x, &lookup)?;
        if !((va - vb).abs() <= reltol * (1.0 + va.abs().max(vb.abs()))) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn eq(a: &str, b: &str, lo: f64, hi: f64) -> Result<bool> {
        equivalent(&parse(a).unwrap(), &parse(b).unwrap(), (lo, hi), 16, 1e-12, &BTreeMap::new())
    }

    #[test]
    fn algebraic_identity_holds() {
        assert!(eq("(x+1)^2", "x^2+2*x+1", 0.0, 1.0).unwrap());
    }

    #[test]
    fn different_functions_differ() {
        assert!(!eq("x^2", "x^3", 0.5, 2.0).unwrap());
    }

    #[test]
    fn evaluation_failures_propagate() {
        assert!(matches!(eq("ln(x)", "x", -2.0, -1.0), Err(Error::Domain { .. })));
        assert!(eq("x", "x", 1.0, 1.0).is_err());
    }
}
