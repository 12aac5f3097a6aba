use super::eval::{call, power};
use super::Expr;

/// Folds constants and removes neutral elements.
///
/// The result evaluates to the same value as the input wherever both are
/// defined. No expansion or term collection is attempted.
pub fn simplify(e: &Expr) -> Expr {
    let mut cur = e.map(&mut rewrite);
    // A rewrite can expose a new opportunity one level up; a few sweeps settle it.
    for _ in 0..4 {
        let next = cur.map(&mut rewrite);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn finite(v: f64) -> Option<Expr> {
    v.is_finite().then_some(Expr::Const(v))
}

fn fold(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Neg(a) => finite(-a.as_const()?),
        Expr::Add(a, b) => finite(a.as_const()? + b.as_const()?),
        Expr::Sub(a, b) => finite(a.as_const()? - b.as_const()?),
        Expr::Mul(a, b) => finite(a.as_const()? * b.as_const()?),
        Expr::Div(a, b) => {
            let d = b.as_const()?;
            if d == 0.0 {
                return None;
            }
            finite(a.as_const()? / d)
        }
        Expr::Pow(a, b) => finite(power(a.as_const()?, b.as_const()?).ok()?),
        Expr::Call(f, a) => finite(call(*f, a.as_const()?).ok()?),
        _ => None,
    }
}

/// `-e` without a top-level negation, when the sign can be pushed into a
/// constant factor, a leading factor or a difference.
fn absorb_negation(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Const(c) => Some(Expr::Const(-c)),
        Expr::Neg(inner) => Some((**inner).clone()),
        Expr::Sub(l, r) => Some(Expr::Sub(r.clone(), l.clone())),
        Expr::Mul(l, r) => Some(Expr::Mul(Box::new(absorb_negation(l)?), r.clone())),
        Expr::Div(l, r) => Some(Expr::Div(Box::new(absorb_negation(l)?), r.clone())),
        _ => None,
    }
}

fn rewrite(e: Expr) -> Expr {
    if let Some(folded) = fold(&e) {
        return folded;
    }
    match e {
        Expr::Neg(a) => absorb_negation(&a).unwrap_or(Expr::Neg(a)),
        Expr::Add(a, b) => {
            if a.is_zero() {
                *b
            } else if b.is_zero() {
                *a
            } else if let Expr::Neg(nb) = *b {
                Expr::Sub(a, nb)
            } else if let Some(c) = b.as_const().filter(|c| *c < 0.0) {
                Expr::Sub(a, Box::new(Expr::Const(-c)))
            } else if let Expr::Neg(na) = *a {
                Expr::Sub(b, na)
            } else {
                Expr::Add(a, b)
            }
        }
        Expr::Sub(a, b) => {
            if b.is_zero() {
                *a
            } else if a.is_zero() {
                Expr::Neg(b)
            } else if let Expr::Neg(nb) = *b {
                Expr::Add(a, nb)
            } else if let Some(c) = b.as_const().filter(|c| *c < 0.0) {
                Expr::Add(a, Box::new(Expr::Const(-c)))
            } else {
                Expr::Sub(a, b)
            }
        }
        Expr::Mul(a, b) => {
            if a.is_zero() || b.is_zero() {
                Expr::Const(0.0)
            } else if a.is_const(1.0) {
                *b
            } else if b.is_const(1.0) {
                *a
            } else if a.is_const(-1.0) {
                Expr::Neg(b)
            } else if b.is_const(-1.0) {
                Expr::Neg(a)
            } else if b.as_const().is_some() && a.as_const().is_none() {
                // constants to the left
                rewrite(Expr::Mul(b, a))
            } else if let (Some(c), Expr::Mul(l, r)) = (a.as_const(), b.as_ref()) {
                // c1*(c2*e) -> (c1*c2)*e
                match l.as_const().and_then(|d| finite(c * d)) {
                    Some(prod) => Expr::Mul(Box::new(prod), r.clone()),
                    None => Expr::Mul(a, b),
                }
            } else {
                match (*a, *b) {
                    (Expr::Neg(na), Expr::Neg(nb)) => Expr::Mul(na, nb),
                    (Expr::Neg(na), other) => Expr::Neg(Box::new(Expr::Mul(na, Box::new(other)))),
                    (other, Expr::Neg(nb)) => Expr::Neg(Box::new(Expr::Mul(Box::new(other), nb))),
                    (l, r) => Expr::Mul(Box::new(l), Box::new(r)),
                }
            }
        }
        Expr::Div(a, b) => {
            if b.is_const(1.0) {
                *a
            } else if a.is_zero() {
                Expr::Const(0.0)
            } else if b.is_const(-1.0) {
                Expr::Neg(a)
            } else {
                match (*a, *b) {
                    (Expr::Neg(na), Expr::Neg(nb)) => Expr::Div(na, nb),
                    (Expr::Neg(na), other) => Expr::Neg(Box::new(Expr::Div(na, Box::new(other)))),
                    (l, r) => Expr::Div(Box::new(l), Box::new(r)),
                }
            }
        }
        Expr::Pow(a, b) => {
            if b.is_const(1.0) {
                *a
            } else if b.is_zero() || a.is_const(1.0) {
                Expr::Const(1.0)
            } else {
                Expr::Pow(a, b)
            }
        }
        other => other,
    }
}
