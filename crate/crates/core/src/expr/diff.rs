use super::{simplify, Expr, Func};

/// Exact derivative with respect to `x`; parameters are constants.
pub fn differentiate(e: &Expr) -> Expr {
    differentiate_with(e, &|_| None)
}

/// Derivative with respect to `x` where a parameter may itself depend on `x`:
/// `param_rule(name)` returns its derivative, or `None` for a constant.
///
/// This is how derivative-indexed symbols (`psi0 -> psi1`, grid leaves) are
/// chained without new node kinds. The result is simplified.
pub fn differentiate_with(e: &Expr, param_rule: &dyn Fn(&str) -> Option<Expr>) -> Expr {
    simplify(&raw(e, param_rule))
}

fn raw(e: &Expr, rule: &dyn Fn(&str) -> Option<Expr>) -> Expr {
    let d = |c: &Expr| raw(c, rule);
    match e {
        Expr::Const(_) | Expr::Pi => Expr::Const(0.0),
        Expr::Var => Expr::Const(1.0),
        Expr::Param(name) => rule(name).unwrap_or(Expr::Const(0.0)),
        Expr::Neg(a) => -d(a),
        Expr::Add(a, b) => d(a) + d(b),
        Expr::Sub(a, b) => d(a) - d(b),
        Expr::Mul(a, b) => d(a) * (**b).clone() + (**a).clone() * d(b),
        Expr::Div(a, b) => {
            let (da, db) = (simplify(&d(a)), simplify(&d(b)));
            if db.is_zero() {
                da / (**b).clone()
            } else {
                (da * (**b).clone() - (**a).clone() * db) / (**b).clone().powi(2)
            }
        }
        Expr::Pow(base, exponent) => {
            let de = simplify(&d(exponent));
            let db = d(base);
            if de.is_zero() {
                // n * b^(n-1) * b'
                let n = (**exponent).clone();
                let reduced = simplify(&(n.clone() - 1.0));
                n * (**base).clone().pow(reduced) * db
            } else {
                // b^e * (e' ln b + e b'/b)
                e.clone() * (de * (**base).clone().ln() + (**exponent).clone() * db / (**base).clone())
            }
        }
        Expr::Call(f, a) => {
            let inner = (**a).clone();
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => 1.0 / inner,
                Func::Sin => Func::Cos.apply(inner),
                Func::Cos => -Func::Sin.apply(inner),
                Func::Sinh => Func::Cosh.apply(inner),
                Func::Cosh => Func::Sinh.apply(inner),
                Func::Sqrt => 1.0 / (2.0 * e.clone()),
            };
            outer * d(a)
        }
    }
}
