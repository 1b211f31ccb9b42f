//! Fractions of Laurent/Puiseux polynomials, the coefficient field used for
//! cyclic-vector relations over the two-variable bases.

use std::fmt;

use num_traits::One;

use crate::series::{PuiseuxPoly, Rat};

/// `num / den` with `den != 0`.  Not reduced in general (no multivariate gcd);
/// monomial denominators and exact quotients are folded away.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: PuiseuxPoly,
    den: PuiseuxPoly,
}

impl RationalFunction {
    pub fn new(num: PuiseuxPoly, den: PuiseuxPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut f = RationalFunction { num, den };
        f.normalize();
        f
    }

    pub fn poly(p: PuiseuxPoly) -> Self {
        let arity = p.arity();
        RationalFunction { num: p, den: PuiseuxPoly::one().with_arity(arity) }
    }

    pub fn constant(c: Rat) -> Self {
        Self::poly(PuiseuxPoly::constant(c))
    }

    pub fn num(&self) -> &PuiseuxPoly {
        &self.num
    }

    pub fn den(&self) -> &PuiseuxPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = PuiseuxPoly::one();
            return;
        }
        if self.den.is_monomial() || self.den.len() == 1 {
            self.num = self.num.exact_div(&self.den).expect("monomial division");
            self.den = PuiseuxPoly::one();
            return;
        }
        if let Some(q) = self.num.exact_div(&self.den) {
            self.num = q;
            self.den = PuiseuxPoly::one();
            return;
        }
        let lead = self.den.lex_max().map(|(_, c)| c.clone()).unwrap();
        if !lead.is_one() {
            let inv = lead.recip();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(&self.num + &o.num, self.den.clone());
        }
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn inv(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    /// Weighted Euler derivation `w0 x d/dx + w1 y d/dy`, quotient rule.
    pub fn euler(&self, w: &[Rat; 2]) -> Self {
        if self.den.as_constant().is_some() {
            return Self::new(self.num.euler(w), self.den.clone());
        }
        let n = &(&self.num.euler(w) * &self.den) - &(&self.num * &self.den.euler(w));
        Self::new(n, &self.den * &self.den)
    }

    /// `log|f|_r`; `None` for zero.
    pub fn log_norm(&self, r: &[Rat]) -> Option<Rat> {
        let a = self.num.gauss_log_norm(r)?;
        let b = self.den.gauss_log_norm(r).expect("nonzero denominator");
        Some(a - b)
    }

    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.is_polynomial() {
            let c = self.den.as_constant().unwrap();
            return self.num.scale(&c.recip()).to_string_with(names);
        }
        format!("({})/({})", self.num.to_string_with(names), self.den.to_string_with(names))
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, o: &Self) -> bool {
        (&self.num * &o.den) == (&o.num * &self.den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&["x", "y"]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{parse_poly, rat};

    fn p(s: &str) -> PuiseuxPoly {
        parse_poly(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn field_operations() {
        let a = RationalFunction::new(p("1"), p("1 + x"));
        let b = RationalFunction::new(p("x"), p("1 + x"));
        assert_eq!(a.add(&b), RationalFunction::constant(rat(1)));
        assert_eq!(a.mul(&a.inv()), RationalFunction::constant(rat(1)));
        let c = RationalFunction::new(p("x^2 - 1"), p("x - 1"));
        assert!(c.is_polynomial());
        assert_eq!(c, RationalFunction::poly(p("x + 1")));
    }

    #[test]
    fn norms_and_derivation() {
        let f = RationalFunction::new(p("x^-2"), p("1 + x*y"));
        assert_eq!(f.log_norm(&[rat(1), rat(1)]), Some(rat(2)));
        // D(1/(1+x)) with D = x d/dx is -x/(1+x)^2
        let g = RationalFunction::new(p("1"), p("1 + x"));
        let dg = g.euler(&[rat(1), rat(0)]);
        assert_eq!(dg, RationalFunction::new(p("-x"), p("1 + 2*x + x^2")));
    }
}
