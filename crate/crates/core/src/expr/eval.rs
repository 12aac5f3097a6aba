use super::{Bindings, Expr, Func};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Evaluates `e` with `x` and parameters taken from `b`.
pub fn evaluate<T: Scalar>(e: &Expr, b: &Bindings<T>) -> Result<T> {
    evaluate_with(e, b.x, &|name| b.get(name))
}

/// Evaluates `e` at `x`, resolving parameters through `lookup`.
pub fn evaluate_with<T: Scalar>(e: &Expr, x: T, lookup: &dyn Fn(&str) -> Option<T>) -> Result<T> {
    let ev = |c: &Expr| evaluate_with(c, x, lookup);
    Ok(match e {
        Expr::Const(v) => T::lit(*v),
        Expr::Pi => T::PI(),
        Expr::Var => x,
        Expr::Param(name) => lookup(name).ok_or_else(|| Error::UnboundParameter(name.clone()))?,
        Expr::Neg(a) => -ev(a)?,
        Expr::Add(a, b) => ev(a)? + ev(b)?,
        Expr::Sub(a, b) => ev(a)? - ev(b)?,
        Expr::Mul(a, b) => ev(a)? * ev(b)?,
        Expr::Div(a, b) => {
            let num = ev(a)?;
            let den = ev(b)?;
            if den == T::zero() {
                return Err(Error::DivisionByZero);
            }
            num / den
        }
        Expr::Pow(a, b) => power(ev(a)?, ev(b)?)?,
        Expr::Call(f, a) => call(*f, ev(a)?)?,
    })
}

/// Integer exponents use repeated multiplication and accept any base;
/// other exponents go through exp(e·ln b) and need a positive base.
pub(crate) fn power<T: Scalar>(base: T, exponent: T) -> Result<T> {
    let limit = T::lit(i32::MAX as f64);
    if exponent.fract() == T::zero() && exponent.abs() <= limit {
        let n = exponent.to_i32().expect("bounded integer exponent");
        if n < 0 && base == T::zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(base.powi(n));
    }
    if base > T::zero() {
        Ok(base.powf(exponent))
    } else if base == T::zero() && exponent > T::zero() {
        Ok(T::zero())
    } else {
        Err(Error::Domain {
            func: "non-integer power",
            arg: base.as_f64(),
        })
    }
}

pub(crate) fn call<T: Scalar>(f: Func, v: T) -> Result<T> {
    Ok(match f {
        Func::Exp => v.exp(),
        Func::Ln => {
            if v <= T::zero() {
                return Err(Error::Domain {
                    func: "ln",
                    arg: v.as_f64(),
                });
            }
            v.ln()
        }
        Func::Sin => v.sin(),
        Func::Cos => v.cos(),
        Func::Sinh => v.sinh(),
        Func::Cosh => v.cosh(),
        Func::Sqrt => {
            if v < T::zero() {
                return Err(Error::Domain {
                    func: "sqrt",
                    arg: v.as_f64(),
                });
            }
            v.sqrt()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn at(text: &str, x: f64) -> Result<f64> {
        evaluate(&parse(text).unwrap(), &Bindings::at(x))
    }

    #[test]
    fn spot_values() {
        assert_eq!(at("sin(x)", 0.0).unwrap(), 0.0);
        assert_eq!(at("2+3*x", 2.0).unwrap(), 8.0);
    }

    #[test]
    fn exp_matches_taylor_series() {
        // 1/k! summed until the terms drop below 1e-18
        let mut term = 1.0_f64;
        let mut sum = 0.0;
        for k in 1..30 {
            sum += term;
            term /= k as f64;
        }
        let v = at("exp(x)", 1.0).unwrap();
        assert!((v - sum).abs() < 1e-12);
        assert!((v - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn domain_errors_are_reported() {
        assert!(matches!(at("ln(x)", 0.0), Err(Error::Domain { func: "ln", .. })));
        assert!(matches!(at("sqrt(x)", -1.0), Err(Error::Domain { func: "sqrt", .. })));
        assert_eq!(at("1/x", 0.0), Err(Error::DivisionByZero));
        assert!(matches!(at("x^0.5", -4.0), Err(Error::Domain { .. })));
        assert_eq!(at("x^-1", 0.0), Err(Error::DivisionByZero));
    }

    #[test]
    fn integer_powers_accept_negative_bases() {
        assert_eq!(at("x^3", -2.0).unwrap(), -8.0);
        assert_eq!(at("x^(-2)", -2.0).unwrap(), 0.25);
        assert!((at("x^1.5", 4.0).unwrap() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn parameters_must_be_bound() {
        let e = parse("b*x").unwrap();
        assert_eq!(
            evaluate(&e, &Bindings::at(2.0)),
            Err(Error::UnboundParameter("b".into()))
        );
        assert_eq!(evaluate(&e, &Bindings::at(2.0).with("b", 3.0)).unwrap(), 6.0);
    }

    #[test]
    fn evaluates_in_single_precision() {
        let e = parse("x^2 + pi").unwrap();
        let v: f32 = evaluate(&e, &Bindings::at(2.0_f32)).unwrap();
        assert!((v - (4.0 + std::f32::consts::PI)).abs() < 1e-6);
    }
}
