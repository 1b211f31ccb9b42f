//! Reduced univariate rational functions over Q.
//!
//! Used for exact lattice computations over `Q[[w]]` through the local ring
//! `Q[w]_(w)`, which has the same lengths and valuations as its completion.

use std::fmt;

use num_traits::{One, Zero};

use super::poly::PuiseuxPoly;
use super::rat::Rat;
use super::upoly::UPoly;

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: UPoly,
    den: UPoly,
}

impl RatFunc {
    pub fn new(num: UPoly, den: UPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (n, _) = num.divrem(&g);
        let (d, _) = den.divrem(&g);
        let l = d.lead();
        RatFunc { num: n.scale(&l.recip()), den: d.monic() }
    }

    pub fn zero() -> Self {
        RatFunc { num: UPoly::zero(), den: UPoly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: UPoly::one(), den: UPoly::one() }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc { num: UPoly::constant(c), den: UPoly::one() }
    }

    /// `w^k` for any integer `k`.
    pub fn w_pow(k: i64) -> Self {
        if k >= 0 {
            RatFunc { num: UPoly::monomial(k as usize, Rat::one()), den: UPoly::one() }
        } else {
            RatFunc { num: UPoly::one(), den: UPoly::monomial((-k) as usize, Rat::one()) }
        }
    }

    /// Converts a one-variable Puiseux polynomial in `z` using `w = z^(1/h)`;
    /// `h` must be a multiple of the polynomial's ramification index.
    pub fn from_puiseux(p: &PuiseuxPoly, h: u32) -> Self {
        let q = p.lift_h(h);
        let minexp = q.raw_terms().map(|(m, _)| m[0]).min().unwrap_or(0).min(0);
        let mut c = Vec::new();
        for (m, a) in q.raw_terms() {
            let k = (m[0] - minexp) as usize;
            if c.len() <= k {
                c.resize(k + 1, Rat::zero());
            }
            c[k] = a.clone();
        }
        Self::new(UPoly::new(c), UPoly::monomial((-minexp) as usize, Rat::one()))
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `w`-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let a = self.num.ord0()? as i64;
        let b = self.den.ord0().unwrap() as i64;
        Some(a - b)
    }

    /// Value at `w = 0` of an element of nonnegative valuation.
    pub fn residue(&self) -> Rat {
        match self.valuation() {
            Some(0) => self.num.coeff(0) / self.den.coeff(0),
            Some(v) if v > 0 => Rat::zero(),
            None => Rat::zero(),
            _ => panic!("residue of an element with a pole"),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    /// `w d/dw`.
    pub fn w_euler(&self) -> Self {
        // w (n'd - n d') / d^2
        let wn = self.num.derivative().shift(1);
        let wd = self.den.derivative().shift(1);
        Self::new(wn.mul(&self.den).sub(&self.num.mul(&wd)), self.den.mul(&self.den))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num.to_string_var("w"))
        } else {
            write!(f, "({})/({})", self.num.to_string_var("w"), self.den.to_string_var("w"))
        }
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl std::ops::Add for RatFunc {
    type Output = RatFunc;
    fn add(self, o: RatFunc) -> RatFunc {
        RatFunc::add(&self, &o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse::parse_poly;
    use crate::series::rat::rat;

    #[test]
    fn valuation_and_reduction() {
        let a = RatFunc::from_puiseux(&parse_poly("z^-2 + z^-1", &["z"]).unwrap(), 1);
        assert_eq!(a.valuation(), Some(-2));
        let b = RatFunc::from_puiseux(&parse_poly("1 + z", &["z"]).unwrap(), 1);
        let q = a.div(&b);
        assert_eq!(q, RatFunc::w_pow(-2));
        assert_eq!(RatFunc::from_puiseux(&parse_poly("z^(1/2)", &["z"]).unwrap(), 2), RatFunc::w_pow(1));
    }

    #[test]
    fn euler_derivation() {
        let a = RatFunc::w_pow(-3);
        assert_eq!(a.w_euler(), RatFunc::w_pow(-3).mul(&RatFunc::constant(rat(-3))));
        let b = RatFunc::one().div(&RatFunc::from_puiseux(&parse_poly("1 - z", &["z"]).unwrap(), 1));
        // w d/dw (1/(1-w)) = w/(1-w)^2
        let expect = RatFunc::w_pow(1).div(&RatFunc::from_puiseux(&parse_poly("1 - 2*z + z^2", &["z"]).unwrap(), 1));
        assert_eq!(b.w_euler(), expect);
    }
}
