//! Text syntax for polynomials: `3/2*x^-2*y^3 + x^(1/2) - 5`.
//!
//! Terms are products of a rational coefficient and variable powers; `/`
//! between factors divides (so `y/x` is `y*x^-1`).  Exponents are integers or
//! parenthesised rationals.  Whitespace is ignored.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::PuiseuxPoly;
use super::rat::{rat, Rat};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' => {
                let st = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let t: String = chars[st..i].iter().collect();
                out.push(Tok::Num(t.parse().unwrap()));
            }
            c if c.is_alphabetic() || c == '_' => {
                let st = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[st..i].iter().collect()));
            }
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' | '·' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
}

/// One parsed monomial: coefficient and rational exponents.
struct Term {
    coef: Rat,
    exps: [Rat; 2],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.next() {
            Some(Tok::Num(n)) => Ok(if neg { -n } else { n }),
            got => Err(Error::Parse(format!("expected integer, found {got:?}"))),
        }
    }

    fn exponent(&mut self) -> Result<Rat> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let p = self.int()?;
            let q = if self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                self.int()?
            } else {
                BigInt::one()
            };
            self.expect(Tok::RParen)?;
            if q.is_zero() {
                return Err(Error::Parse("zero denominator in exponent".into()));
            }
            Ok(Rat::new(p, q))
        } else {
            Ok(Rat::from_integer(self.int()?))
        }
    }

    /// Parses one factor and folds it into `t` (inverted when `div`).
    fn factor(&mut self, t: &mut Term, div: bool) -> Result<()> {
        match self.next() {
            Some(Tok::Num(n)) => {
                let v = Rat::from_integer(n);
                if div {
                    if v.is_zero() {
                        return Err(Error::Parse("division by zero".into()));
                    }
                    t.coef /= v;
                } else {
                    t.coef *= v;
                }
            }
            Some(Tok::Ident(name)) => {
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}` (expected one of {:?})", self.vars)))?;
                let e = if self.peek() == Some(&Tok::Caret) {
                    self.pos += 1;
                    self.exponent()?
                } else {
                    Rat::one()
                };
                if div {
                    t.exps[idx] -= e;
                } else {
                    t.exps[idx] += e;
                }
            }
            got => return Err(Error::Parse(format!("expected a number or variable, found {got:?}"))),
        }
        Ok(())
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = Term { coef: Rat::one(), exps: [Rat::zero(), Rat::zero()] };
        self.factor(&mut t, false)?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    self.factor(&mut t, false)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    self.factor(&mut t, true)?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) => self.factor(&mut t, false)?,
                _ => break,
            }
        }
        Ok(t)
    }
}

/// Parses a polynomial in the given variables (one or two names).
pub fn parse_poly(s: &str, vars: &[&str]) -> Result<PuiseuxPoly> {
    if vars.is_empty() || vars.len() > 2 {
        return Err(Error::Input("one or two variables are supported".into()));
    }
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut p = Parser { toks, pos: 0, vars };
    let arity = vars.len() as u8;
    let mut acc = PuiseuxPoly::zero().with_arity(arity);
    let mut first = true;
    while p.pos < p.toks.len() {
        let sign = match p.peek() {
            Some(Tok::Plus) => {
                p.pos += 1;
                rat(1)
            }
            Some(Tok::Minus) => {
                p.pos += 1;
                rat(-1)
            }
            _ if first => rat(1),
            got => return Err(Error::Parse(format!("expected + or -, found {got:?}"))),
        };
        first = false;
        let t = p.term()?;
        let m = PuiseuxPoly::monomial(arity, t.exps, t.coef * sign);
        acc = &acc + &m;
    }
    Ok(acc.with_arity(arity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat::ratq;

    #[test]
    fn parses_spec_syntax() {
        let f = parse_poly("3/2*x^-2*y^3", &["x", "y"]).unwrap();
        assert_eq!(f.coeff(&[rat(-2), rat(3)]), ratq(3, 2));
        let g = parse_poly(" x^(1/2) ", &["x", "y"]).unwrap();
        assert_eq!(g.h(), 2);
        assert_eq!(g.coeff(&[ratq(1, 2), rat(0)]), rat(1));
        let h = parse_poly("y/x - 2", &["x", "y"]).unwrap();
        assert_eq!(h.coeff(&[rat(-1), rat(1)]), rat(1));
        assert_eq!(h.constant_term(), rat(-2));
        let k = parse_poly("x^(-3/2)", &["z"]);
        assert!(k.is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["3/2*x^-2*y^3 + x^(1/2) - 5", "-y*x^-1", "x^-3*y^-3 + x^-1", "0", "-1/3"] {
            let f = parse_poly(s, &["x", "y"]).unwrap();
            let g = parse_poly(&f.to_string(), &["x", "y"]).unwrap();
            assert_eq!(f, g, "{s}");
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("x^", &["x", "y"]).is_err());
        assert!(parse_poly("x + + y", &["x", "y"]).is_err());
        assert!(parse_poly("x $ y", &["x", "y"]).is_err());
        assert!(parse_poly("1/0", &["x", "y"]).is_err());
    }
}
