//! Truncated power/Laurent series: a polynomial body plus a precision cutoff.
//!
//! Terms whose total degree (sum of exponents) is at least the cutoff are
//! unknown; a cutoff of `None` means the body is exact.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::PuiseuxPoly;
use super::rat::Rat;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    body: PuiseuxPoly,
    prec: Option<Rat>,
}

fn degree_of(p: &PuiseuxPoly, m: &[Rat; 2]) -> Rat {
    let _ = p;
    &m[0] + &m[1]
}

fn min_opt(a: &Option<Rat>, b: &Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (None, x) | (x, None) => x.clone(),
        (Some(a), Some(b)) => Some(if a <= b { a.clone() } else { b.clone() }),
    }
}

impl TruncatedSeries {
    /// Series known exactly.
    pub fn exact(body: PuiseuxPoly) -> Self {
        TruncatedSeries { body, prec: None }
    }

    /// Series known modulo total degree `prec`; the body is truncated.
    pub fn new(body: PuiseuxPoly, prec: Rat) -> Self {
        let mut s = TruncatedSeries { body, prec: Some(prec) };
        s.truncate();
        s
    }

    pub fn zero_mod(prec: Rat) -> Self {
        TruncatedSeries { body: PuiseuxPoly::zero(), prec: Some(prec) }
    }

    fn truncate(&mut self) {
        if let Some(n) = &self.prec {
            if self.body.terms().any(|(e, _)| degree_of(&self.body, &e) >= *n) {
                let keep: Vec<_> = self
                    .body
                    .raw_terms()
                    .filter(|(m, _)| {
                        let e = self.body.exps(m);
                        &e[0] + &e[1] < *n
                    })
                    .map(|(m, c)| (*m, c.clone()))
                    .collect();
                self.body = PuiseuxPoly::from_raw(self.body.arity(), self.body.h(), self.body.poles(), keep);
            }
        }
    }

    pub fn body(&self) -> &PuiseuxPoly {
        &self.body
    }

    pub fn into_body(self) -> PuiseuxPoly {
        self.body
    }

    pub fn precision(&self) -> Option<&Rat> {
        self.prec.as_ref()
    }

    /// Lowest total degree present in the body (`None` if the body is empty).
    pub fn valuation(&self) -> Option<Rat> {
        self.body.terms().map(|(e, _)| &e[0] + &e[1]).min()
    }

    /// True when the body is empty (the series is zero to known precision).
    pub fn is_zero_to_precision(&self) -> bool {
        self.body.is_zero()
    }

    /// Lower bound on the valuation: the body's valuation, or the cutoff if empty.
    fn val_bound(&self) -> Option<Rat> {
        self.valuation().or_else(|| self.prec.clone())
    }

    pub fn with_precision(&self, prec: Rat) -> Self {
        let p = min_opt(&self.prec, &Some(prec));
        let mut s = TruncatedSeries { body: self.body.clone(), prec: p };
        s.truncate();
        s
    }

    pub fn scale(&self, c: &Rat) -> Self {
        TruncatedSeries { body: self.body.scale(c), prec: self.prec.clone() }
    }

    /// Applies a weighted Euler derivation (it preserves degrees termwise).
    pub fn euler(&self, w: &[Rat; 2]) -> Self {
        TruncatedSeries { body: self.body.euler(w), prec: self.prec.clone() }
    }

    /// Multiplies by a monomial of total degree `d`.
    pub fn shift(&self, exps: &[Rat; 2]) -> Self {
        let d = &exps[0] + &exps[1];
        TruncatedSeries { body: self.body.shift(exps), prec: self.prec.as_ref().map(|p| p + d) }
    }

    /// Inverse of a series whose lowest-degree part is a single monomial.
    ///
    /// The result is correct modulo total degree `n`.
    pub fn inverse(&self, n: &Rat) -> Result<Self> {
        let v = self.valuation().ok_or(Error::NonUnit)?;
        let lows: Vec<_> = self.body.terms().filter(|(e, _)| &e[0] + &e[1] == v).map(|(e, c)| (e, c.clone())).collect();
        if lows.len() != 1 {
            return Err(Error::NonUnit);
        }
        let (e0, _) = lows[0].clone();
        let neg = [-e0[0].clone(), -e0[1].clone()];
        let unit = self.shift(&neg);
        // 1/f = x^-e0 * 1/unit, and 1/unit is needed modulo n + v.
        let inv = invert_unit(&unit, &(n + &v))?;
        Ok(inv.shift(&neg).with_precision(n.clone()))
    }
}

/// Inverse of a unit series (nonzero constant term, all other terms of
/// positive total degree) modulo total degree `n`.
pub fn invert_unit(f: &TruncatedSeries, n: &Rat) -> Result<TruncatedSeries> {
    let c0 = f.body.constant_term();
    if c0.is_zero() {
        return Err(Error::NonUnit);
    }
    if f.body.terms().any(|(e, _)| {
        let d = &e[0] + &e[1];
        d < Rat::zero() || (d.is_zero() && !(e[0].is_zero() && e[1].is_zero()))
    }) {
        return Err(Error::NonUnit);
    }
    let target = min_opt(&f.prec, &Some(n.clone())).unwrap();
    let inv_c0 = c0.recip();
    // Newton iteration g <- g (2 - f g): each step doubles the known degree,
    // starting from the smallest positive degree present in f.
    let step = f.body.terms().map(|(e, _)| &e[0] + &e[1]).filter(|d| *d > Rat::zero()).min();
    let mut acc = TruncatedSeries::exact(PuiseuxPoly::constant(inv_c0.clone()));
    if let Some(step) = step {
        let two = TruncatedSeries::exact(PuiseuxPoly::constant(Rat::from_integer(2.into())));
        let mut known = step;
        loop {
            let next = min_opt(&Some(&known + &known), &Some(target.clone())).unwrap();
            let fe = TruncatedSeries::new(f.body.clone(), next.clone());
            let ge = TruncatedSeries::exact(acc.body.clone());
            let fg = TruncatedSeries::exact((&fe * &ge).with_precision(next.clone()).body);
            acc = (&ge * &(&two - &fg)).with_precision(next.clone());
            if next >= target {
                break;
            }
            known = next;
        }
    }
    acc.prec = Some(target);
    let mut out = acc;
    out.body = out.body.with_arity(f.body.arity().max(1));
    Ok(out)
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let mut s = TruncatedSeries { body: &self.body + &rhs.body, prec: min_opt(&self.prec, &rhs.prec) };
        s.truncate();
        s
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { body: -&self.body, prec: self.prec.clone() }
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let pa = match (&rhs.prec, self.val_bound()) {
            (Some(p), Some(v)) => Some(p + v),
            (Some(_), None) => None,
            (None, _) => None,
        };
        let pb = match (&self.prec, rhs.val_bound()) {
            (Some(p), Some(v)) => Some(p + v),
            _ => None,
        };
        // An exactly-zero factor makes the product exactly zero.
        let exact_zero = |s: &TruncatedSeries| s.prec.is_none() && s.body.is_zero();
        if exact_zero(self) || exact_zero(rhs) {
            return TruncatedSeries::exact(PuiseuxPoly::zero());
        }
        let prec = min_opt(&pa, &pb);
        let body = match &prec {
            Some(n) => self.body.mul_truncated(&rhs.body, n),
            None => &self.body * &rhs.body,
        };
        TruncatedSeries { body, prec }
    }
}

impl One for TruncatedSeries {
    fn one() -> Self {
        TruncatedSeries::exact(PuiseuxPoly::one())
    }
}

impl Mul for TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: TruncatedSeries) -> TruncatedSeries {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse::parse_poly;
    use crate::series::rat::{rat, ratq};

    fn s(src: &str, n: i64) -> TruncatedSeries {
        TruncatedSeries::new(parse_poly(src, &["x"]).unwrap(), rat(n))
    }

    #[test]
    fn geometric_series() {
        let inv = invert_unit(&s("1 + x", 10), &rat(3)).unwrap();
        assert_eq!(inv.body(), &parse_poly("1 - x + x^2", &["x"]).unwrap());
        let inv = invert_unit(&s("2", 10), &rat(5)).unwrap();
        assert_eq!(inv.body().constant_term(), ratq(1, 2));
        assert_eq!(invert_unit(&s("x", 10), &rat(4)), Err(Error::NonUnit));
    }

    #[test]
    fn inverse_times_series_is_one() {
        let f = s("3 - x + 5*x^2 + x^(7/2)", 20);
        let g = invert_unit(&f, &rat(12)).unwrap();
        let prod = (&f * &g).with_precision(rat(12));
        assert_eq!(prod.body(), &PuiseuxPoly::one());
    }

    #[test]
    fn laurent_inverse() {
        let f = s("x^-2 + x^-1", 10);
        let g = f.inverse(&rat(6)).unwrap();
        let prod = (&f * &g).with_precision(rat(4));
        assert_eq!(prod.body(), &PuiseuxPoly::one());
    }

    #[test]
    fn bivariate_unit() {
        let f = TruncatedSeries::new(parse_poly("1 + x + y", &["x", "y"]).unwrap(), rat(10));
        let g = invert_unit(&f, &rat(4)).unwrap();
        let prod = (&f * &g).with_precision(rat(4));
        assert_eq!(prod.body(), &PuiseuxPoly::one());
    }
}
