use super::{Expr, Func};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(u8),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    /// Next token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let tok = match c {
            b'0'..=b'9' => {
                self.digits();
                if self.src.get(self.pos) == Some(&b'.') {
                    self.pos += 1;
                    if self.digits() == 0 {
                        return Err(syntax(self.pos, "expected digits after decimal point"));
                    }
                }
                if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
                    self.pos += 1;
                    if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                        self.pos += 1;
                    }
                    if self.digits() == 0 {
                        return Err(syntax(self.pos, "expected exponent digits"));
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let v: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, "malformed number"))?;
                Tok::Num(v)
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Tok::Ident(text.to_owned())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            _ => return Err(syntax(start, "unexpected character")),
        };
        Ok((tok, start))
    }
}

fn syntax(offset: usize, message: &str) -> Error {
    Error::Syntax {
        offset,
        message: message.to_owned(),
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
}

// Binding powers, loosest first.
const ADD_BP: (u8, u8) = (1, 2);
const MUL_BP: (u8, u8) = (3, 4);
const NEG_BP: u8 = 5;
const POW_BP: (u8, u8) = (8, 7);

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<()> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.tok {
                Tok::Op(op) => op,
                Tok::RParen | Tok::End => break,
                _ => return Err(syntax(self.at, "expected an operator")),
            };
            let (lbp, rbp) = match op {
                b'+' | b'-' => ADD_BP,
                b'*' | b'/' => MUL_BP,
                b'^' => POW_BP,
                _ => unreachable!(),
            };
            if lbp < min_bp {
                break;
            }
            self.bump()?;
            let rhs = self.expr(rbp)?;
            let (l, r) = (Box::new(lhs), Box::new(rhs));
            lhs = match op {
                b'+' => Expr::Add(l, r),
                b'-' => Expr::Sub(l, r),
                b'*' => Expr::Mul(l, r),
                b'/' => Expr::Div(l, r),
                _ => Expr::Pow(l, r),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let at = self.at;
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Const(v))
            }
            Tok::Op(b'-') => {
                self.bump()?;
                let operand = self.expr(NEG_BP)?;
                Ok(Expr::Neg(Box::new(operand)))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr(0)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump()?;
                if self.tok == Tok::LParen {
                    let func = Func::from_name(&name).ok_or(Error::UnknownFunction {
                        name: name.clone(),
                        offset: at,
                    })?;
                    self.bump()?;
                    let arg = self.expr(0)?;
                    self.expect_rparen()?;
                    return Ok(func.apply(arg));
                }
                match name.as_str() {
                    "x" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Pi),
                    n if Func::from_name(n).is_some() => {
                        Err(syntax(at, "function name used without an argument"))
                    }
                    _ => Ok(Expr::Param(name)),
                }
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            Tok::RParen => Err(syntax(at, "unexpected `)`")),
            Tok::Op(_) => Err(syntax(at, "expected an operand")),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if self.tok != Tok::RParen {
            return Err(syntax(self.at, "expected `)`"));
        }
        self.bump()
    }
}

/// Parses `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        lexer: Lexer {
            src: text.as_bytes(),
            pos: 0,
        },
        tok: Tok::End,
        at: 0,
    };
    p.bump()?;
    let e = p.expr(0)?;
    match p.tok {
        Tok::End => Ok(e),
        _ => Err(syntax(p.at, "unexpected `)`")),
    }
}
