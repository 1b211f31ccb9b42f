//! Rational scalars and small helpers around `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number in canonical form.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratq(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p`, `-p`, or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Serializes as `p/q`, omitting `/1`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

/// Representative of `r mod Z` in `[0, 1)`.
pub fn frac(r: &Rat) -> Rat {
    r - Rat::from_integer(floor(r))
}

pub fn lcm_u32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// Denominator as a machine integer (panics on absurdly large denominators).
pub fn denom_u32(r: &Rat) -> u32 {
    r.denom().to_u32().expect("denominator exceeds u32")
}

pub fn to_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}

pub fn max_rat(a: &Rat, b: &Rat) -> Rat {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Scales a nonzero rational vector to the primitive integer vector on its ray.
pub fn primitive_integer_ray(v: &[Rat]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-7/2", "5/10"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(parse_rat(&fmt_rat(&r)).unwrap(), r);
        }
        assert_eq!(fmt_rat(&parse_rat("5/10").unwrap()), "1/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn fractional_part_is_in_unit_interval() {
        assert_eq!(frac(&ratq(-1, 3)), ratq(2, 3));
        assert_eq!(frac(&rat(4)), rat(0));
        assert_eq!(frac(&ratq(7, 2)), ratq(1, 2));
    }

    #[test]
    fn primitive_ray() {
        let v = primitive_integer_ray(&[ratq(2, 3), ratq(4, 3)]);
        assert_eq!(v, vec![BigInt::from(1), BigInt::from(2)]);
    }
}
