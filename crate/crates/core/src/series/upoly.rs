//! Dense univariate polynomials over Q: gcd, division and rational roots.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rat::{fmt_rat, Rat};
use crate::error::{Error, Result};

/// Coefficients from degree 0 upwards; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly {
    c: Vec<Rat>,
}

impl UPoly {
    pub fn new(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: vec![] }
    }

    pub fn one() -> Self {
        UPoly { c: vec![Rat::one()] }
    }

    pub fn constant(a: Rat) -> Self {
        Self::new(vec![a])
    }

    /// `x - a`.
    pub fn linear_root(a: Rat) -> Self {
        Self::new(vec![-a, Rat::one()])
    }

    /// `c * x^k`.
    pub fn monomial(k: usize, c: Rat) -> Self {
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.c.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lead(&self) -> Rat {
        self.c.last().cloned().unwrap_or_else(Rat::zero)
    }

    /// Order of vanishing at 0.
    pub fn ord0(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        Self::new(self.c.iter().map(|x| x / &l).collect())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a * Rat::from_integer(BigInt::from(i))).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.c.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self::new(self.c.iter().map(|a| a * k).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rat::zero(); k];
        v.extend(self.c.iter().cloned());
        Self::new(v)
    }

    /// Euclidean division `self = q * d + r`.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.c.len() - 1;
        let ld = d.lead();
        let mut r = self.c.clone();
        if r.len() < d.c.len() {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] / &ld;
            if !coef.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] -= &coef * b;
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Scales to a primitive integer polynomial with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for a in &self.c {
            l = l.lcm(a.denom());
        }
        let ints: Vec<BigInt> = self.c.iter().map(|a| (a * Rat::from_integer(l.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for a in &ints {
            g = g.gcd(a);
        }
        let sgn = if self.lead().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|a| a / &g * &sgn).collect()
    }

    /// Rational roots with multiplicity, plus the cofactor without rational roots.
    pub fn rational_roots(&self) -> Result<(Vec<(Rat, usize)>, UPoly)> {
        assert!(!self.is_zero(), "roots of the zero polynomial");
        let mut rest = self.clone();
        let mut roots = Vec::new();
        if let Some(k) = rest.ord0() {
            if k > 0 {
                roots.push((Rat::zero(), k));
                rest = Self::new(rest.c[k..].to_vec());
            }
        }
        if rest.degree().unwrap_or(0) == 0 {
            return Ok((roots, rest));
        }
        let ints = rest.primitive_integer();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let ps = divisors(&a0)?;
        let qs = divisors(&an)?;
        let mut cands: Vec<Rat> = Vec::new();
        for p in &ps {
            for q in &qs {
                let r = Rat::new(p.clone(), q.clone());
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            let lin = Self::linear_root(r.clone());
            let mut mult = 0;
            loop {
                if rest.degree().unwrap_or(0) == 0 {
                    break;
                }
                let (q, rem) = rest.divrem(&lin);
                if !rem.is_zero() {
                    break;
                }
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                roots.push((r, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        Ok((roots, rest))
    }

    /// All roots when they are rational; otherwise `ExtensionRequired` naming
    /// the part without rational roots.
    pub fn split_over_q(&self, context: &str) -> Result<Vec<(Rat, usize)>> {
        let (roots, rest) = self.rational_roots()?;
        if rest.degree().unwrap_or(0) > 0 {
            return Err(Error::ExtensionRequired { poly: rest.monic().to_string_var("t"), context: context.to_string() });
        }
        Ok(roots)
    }

    pub fn to_string_var(&self, v: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => v.to_string(),
                _ => format!("{v}^{i}"),
            };
            let s = if mono.is_empty() {
                fmt_rat(a)
            } else if a.is_one() {
                mono
            } else if (-a).is_one() {
                format!("-{mono}")
            } else {
                format!("{}*{mono}", fmt_rat(a))
            };
            parts.push(s);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_var("t"))
    }
}

/// Positive divisors of a nonnegative integer (trial division).
fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    if n.is_zero() {
        return Ok(vec![BigInt::one()]);
    }
    let m = n.to_u128().filter(|&m| m < (1u128 << 100)).ok_or_else(|| {
        Error::BudgetExhausted(format!("rational-root search: coefficient {n} too large to factor"))
    })?;
    let mut primes: Vec<(u128, u32)> = Vec::new();
    let mut rest = m;
    let mut p: u128 = 2;
    let mut steps: u64 = 0;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            primes.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
        steps += 1;
        if steps > 50_000_000 {
            return Err(Error::BudgetExhausted(format!("rational-root search: cannot factor {n}")));
        }
    }
    if rest > 1 {
        primes.push((rest, 1));
    }
    let mut divs: Vec<u128> = vec![1];
    for (p, e) in primes {
        let cur = divs.clone();
        let mut pk = 1u128;
        for _ in 0..e {
            pk *= p;
            divs.extend(cur.iter().map(|d| d * pk));
        }
    }
    divs.sort();
    Ok(divs.into_iter().map(BigInt::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat::{rat, ratq};

    fn up(v: &[i64]) -> UPoly {
        UPoly::new(v.iter().map(|&x| rat(x)).collect())
    }

    #[test]
    fn roots_with_multiplicity() {
        // (t - 1)^2 (2t + 3) t
        let p = up(&[-1, 1]).pow(2).mul(&up(&[3, 2])).mul(&up(&[0, 1]));
        let (roots, rest) = p.rational_roots().unwrap();
        assert_eq!(roots, vec![(ratq(-3, 2), 1), (rat(0), 1), (rat(1), 2)]);
        assert_eq!(rest.degree(), Some(0));
    }

    #[test]
    fn irrational_part_is_reported() {
        let p = up(&[-2, 0, 1]).mul(&up(&[-5, 1]));
        let (roots, rest) = p.rational_roots().unwrap();
        assert_eq!(roots, vec![(rat(5), 1)]);
        assert_eq!(rest.monic(), up(&[-2, 0, 1]));
        assert!(matches!(p.split_over_q("test"), Err(Error::ExtensionRequired { .. })));
    }

    #[test]
    fn gcd_and_division() {
        let a = up(&[-1, 0, 1]);
        let b = up(&[1, 2, 1]);
        assert_eq!(a.gcd(&b), up(&[1, 1]));
        let (q, r) = up(&[1, 0, 0, 1]).divrem(&up(&[1, 1]));
        assert_eq!(q, up(&[1, -1, 1]));
        assert!(r.is_zero());
    }
}
