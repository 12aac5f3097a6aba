use std::fmt;

use super::Expr;

// Printing levels, loosest first. Negative constants print like a negation.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const NEGATION: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => NEGATION,
        Expr::Const(v) if v.is_sign_negative() => NEGATION,
        Expr::Pow(..) => POWER,
        _ => ATOM,
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints in the parser's grammar with the fewest parentheses that make
/// `parse(print(e))` rebuild the same tree (negative constants come back as
/// a negation of a positive one, which `simplify` folds again).
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) if *v == 0.0 => f.write_str("0"),
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var => f.write_str("x"),
            Expr::Param(p) => f.write_str(p),
            Expr::Neg(a) => {
                f.write_str("-")?;
                child(f, a, level(a) < POWER)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                child(f, a, level(a) < SUM)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                child(f, b, level(b) <= SUM)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                child(f, a, level(a) < PRODUCT)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                child(f, b, level(b) <= PRODUCT)
            }
            Expr::Pow(a, b) => {
                child(f, a, level(a) <= POWER)?;
                f.write_str("^")?;
                child(f, b, level(b) < POWER)
            }
        }
    }
}
