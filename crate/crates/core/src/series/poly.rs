//! Sparse exact Laurent/Puiseux polynomials over Q in one or two variables.
//!
//! Exponents are stored as integer numerators over a shared ramification
//! index `h`, so `x^(3/2)` with `h = 2` is the key `[3, 0]`.  Terms are kept
//! in lexicographic order of the exponent vector and zero coefficients are
//! never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rat::{fmt_rat, lcm_u32, rat, Rat};
use crate::error::{Error, Result};

/// Exponent numerators; the denominator is the owning polynomial's `h`.
pub type Mono = [i64; 2];

/// Element of `Q[x^(±1/h), y^(±1/h)]` (or its one-variable analogue).
#[derive(Clone, Debug)]
pub struct PuiseuxPoly {
    arity: u8,
    h: u32,
    poles: [bool; 2],
    terms: BTreeMap<Mono, Rat>,
}

impl PuiseuxPoly {
    pub fn zero() -> Self {
        PuiseuxPoly { arity: 0, h: 1, poles: [false; 2], terms: BTreeMap::new() }
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert([0, 0], c);
        }
        p
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    /// Monomial `c * x^e0 * y^e1` with rational exponents.
    pub fn monomial(arity: u8, exps: [Rat; 2], c: Rat) -> Self {
        let h = lcm_u32(super::rat::denom_u32(&exps[0]), super::rat::denom_u32(&exps[1]));
        let hr = rat(h as i64);
        let key = [
            to_i64_exact(&(&exps[0] * &hr)),
            to_i64_exact(&(&exps[1] * &hr)),
        ];
        let mut p = PuiseuxPoly { arity, h, poles: [exps[0].is_negative(), exps[1].is_negative()], terms: BTreeMap::new() };
        if !c.is_zero() {
            p.terms.insert(key, c);
        }
        p
    }

    /// Monomial with integer exponents.
    pub fn mono_int(arity: u8, e0: i64, e1: i64, c: Rat) -> Self {
        Self::monomial(arity, [rat(e0), rat(e1)], c)
    }

    /// The variable `x` (index 0) or `y` (index 1).
    pub fn var(arity: u8, i: usize) -> Self {
        let mut e = [0, 0];
        e[i] = 1;
        Self::mono_int(arity, e[0], e[1], Rat::one())
    }

    /// Builds from raw numerators over `h`.
    pub fn from_raw(arity: u8, h: u32, poles: [bool; 2], terms: impl IntoIterator<Item = (Mono, Rat)>) -> Self {
        let mut p = PuiseuxPoly { arity, h: h.max(1), poles, terms: BTreeMap::new() };
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn poles(&self) -> [bool; 2] {
        self.poles
    }

    pub fn with_arity(mut self, arity: u8) -> Self {
        self.arity = arity;
        self
    }

    pub fn with_poles(mut self, poles: [bool; 2]) -> Self {
        self.poles = poles;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Raw `(numerators, coefficient)` pairs in lexicographic order.
    pub fn raw_terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    /// `(exponent vector, coefficient)` pairs in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = ([Rat; 2], &Rat)> + '_ {
        self.terms.iter().map(move |(m, c)| (self.exps(m), c))
    }

    pub fn exps(&self, m: &Mono) -> [Rat; 2] {
        let h = self.h as i64;
        [Rat::new(m[0].into(), h.into()), Rat::new(m[1].into(), h.into())]
    }

    fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Same element, re-expressed over ramification index `h2` (a multiple of `h`).
    pub fn lift_h(&self, h2: u32) -> Self {
        assert!(h2 % self.h == 0, "ramification index must be a multiple");
        let k = (h2 / self.h) as i64;
        if k == 1 {
            return self.clone();
        }
        PuiseuxPoly {
            arity: self.arity,
            h: h2,
            poles: self.poles,
            terms: self.terms.iter().map(|(m, c)| ([m[0] * k, m[1] * k], c.clone())).collect(),
        }
    }

    /// View with ramification index `lcm(h, h2)`; the element is unchanged.
    pub fn ramify(&self, h2: u32) -> Self {
        assert!(h2 >= 1);
        self.lift_h(lcm_u32(self.h, h2))
    }

    /// Smallest index over which every exponent is integral after scaling.
    pub fn minimal_h(&self) -> u32 {
        let mut g = self.h as i64;
        for m in self.terms.keys() {
            g = g.gcd(&m[0]).gcd(&m[1]);
        }
        self.h / (g.max(1) as u32)
    }

    fn merged(&self, other: &Self) -> (u8, u32, [bool; 2]) {
        (
            self.arity.max(other.arity),
            lcm_u32(self.h, other.h),
            [self.poles[0] || other.poles[0], self.poles[1] || other.poles[1]],
        )
    }

    pub fn coeff(&self, exps: &[Rat; 2]) -> Rat {
        let hr = rat(self.h as i64);
        let a = &exps[0] * &hr;
        let b = &exps[1] * &hr;
        if !a.is_integer() || !b.is_integer() {
            return Rat::zero();
        }
        let key = [to_i64_exact(&a), to_i64_exact(&b)];
        self.terms.get(&key).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.terms.get(&[0, 0]).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == [0, 0])
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero().with_arity(self.arity);
        }
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v *= c;
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one().with_arity(self.arity);
        acc.h = self.h;
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to variable `var` (0 = x, 1 = y).
    pub fn deriv(&self, var: usize) -> Self {
        let h = self.h as i64;
        let terms = self.terms.iter().filter(|(m, _)| m[var] != 0).map(|(m, c)| {
            let mut m2 = *m;
            m2[var] -= h;
            (m2, c * Rat::new(m[var].into(), h.into()))
        });
        Self::from_raw(self.arity, self.h, self.poles, terms).with_poles_or(self.poles)
    }

    /// Weighted Euler derivation `w0 * x d/dx + w1 * y d/dy`.
    pub fn euler(&self, w: &[Rat; 2]) -> Self {
        let h = self.h as i64;
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let wt = &w[0] * Rat::new(m[0].into(), h.into()) + &w[1] * Rat::new(m[1].into(), h.into());
                (*m, c * wt)
            })
            .collect();
        Self::from_raw(self.arity, self.h, self.poles, terms)
    }

    /// `r . e` for the raw key `m`.
    fn weight_of(&self, m: &Mono, r: &[Rat]) -> Rat {
        let h = self.h as i64;
        let mut s = Rat::zero();
        for (i, ri) in r.iter().enumerate().take(2) {
            if m[i] != 0 && !ri.is_zero() {
                s += ri * Rat::new(m[i].into(), h.into());
            }
        }
        s
    }

    /// Logarithmic Gauss norm `log|f|_r = max(-(r . e))`; `None` encodes `-inf`.
    pub fn gauss_log_norm(&self, r: &[Rat]) -> Option<Rat> {
        self.terms.keys().map(|m| -self.weight_of(m, r)).max()
    }

    /// Terms on which the Gauss norm at `r` is attained.
    pub fn leading_form(&self, r: &[Rat]) -> Self {
        let Some(g) = self.gauss_log_norm(r) else { return self.clone() };
        let terms: Vec<_> =
            self.terms.iter().filter(|(m, _)| -self.weight_of(m, r) == g).map(|(m, c)| (*m, c.clone())).collect();
        Self::from_raw(self.arity, self.h, self.poles, terms)
    }

    /// Terms strictly above the given log-norm threshold are kept; others dropped.
    pub fn drop_terms_with_log_norm_at_most(&self, r: &[Rat], threshold: &Rat) -> Self {
        let terms: Vec<_> =
            self.terms.iter().filter(|(m, _)| -self.weight_of(m, r) > *threshold).map(|(m, c)| (*m, c.clone())).collect();
        Self::from_raw(self.arity, self.h, self.poles, terms)
    }

    pub fn lex_max(&self) -> Option<(Mono, &Rat)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn lex_min(&self) -> Option<(Mono, &Rat)> {
        self.terms.iter().next().map(|(m, c)| (*m, c))
    }

    /// Minimum exponent of variable `var` over the support.
    pub fn min_exp(&self, var: usize) -> Option<Rat> {
        self.terms.keys().map(|m| Rat::new(m[var].into(), (self.h as i64).into())).min()
    }

    pub fn max_exp(&self, var: usize) -> Option<Rat> {
        self.terms.keys().map(|m| Rat::new(m[var].into(), (self.h as i64).into())).max()
    }

    /// Multiplies by the monomial `x^e0 y^e1`.
    pub fn shift(&self, exps: &[Rat; 2]) -> Self {
        &Self::monomial(self.arity, exps.clone(), Rat::one()).with_poles(self.poles) * self
    }

    /// Exact division in the Laurent ring; `None` when `b` does not divide `self`.
    pub fn exact_div(&self, b: &Self) -> Option<Self> {
        if b.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero().with_arity(self.arity.max(b.arity)));
        }
        let (arity, h, poles) = self.merged(b);
        let a = self.lift_h(h);
        let b = b.lift_h(h);
        if b.terms.len() == 1 {
            let (bm, bc) = b.lex_max().unwrap();
            let terms = a.terms.iter().map(|(m, c)| ([m[0] - bm[0], m[1] - bm[1]], c / bc));
            return Some(Self::from_raw(arity, h, [true, true], terms).with_poles_or(poles));
        }
        let (amin, _) = a.lex_min().unwrap();
        let (bmin, _) = b.lex_min().unwrap();
        let floor = [amin[0] - bmin[0], amin[1] - bmin[1]];
        // Per-variable lower bounds: the lowest power of each variable in a
        // product is the sum of the lowest powers of the factors.
        let low = |p: &Self, i: usize| p.terms.keys().map(|m| m[i]).min().unwrap();
        let bounds = [low(&a, 0) - low(&b, 0), low(&a, 1) - low(&b, 1)];
        let (bm, bc) = b.lex_max().map(|(m, c)| (m, c.clone())).unwrap();
        let mut rem = a;
        let mut q = BTreeMap::new();
        while let Some((rm, rc)) = rem.lex_max().map(|(m, c)| (m, c.clone())) {
            let qm = [rm[0] - bm[0], rm[1] - bm[1]];
            if qm < floor || qm[0] < bounds[0] || qm[1] < bounds[1] {
                return None;
            }
            let qc = &rc / &bc;
            for (m, c) in &b.terms {
                rem.add_term([m[0] + qm[0], m[1] + qm[1]], -(c * &qc));
            }
            q.insert(qm, qc);
        }
        Some(Self::from_raw(arity, h, [true, true], q).with_poles_or(poles))
    }

    fn with_poles_or(mut self, poles: [bool; 2]) -> Self {
        let mut p = poles;
        for m in self.terms.keys() {
            for (i, pi) in p.iter_mut().enumerate() {
                if m[i] < 0 {
                    *pi = true;
                }
            }
        }
        self.poles = p;
        self
    }

    /// Verifies that negative exponents occur only in pole-permitted variables.
    pub fn check_poles(&self, names: &[&str]) -> Result<()> {
        for m in self.terms.keys() {
            for i in 0..2 {
                if m[i] < 0 && !self.poles[i] {
                    let name = names.get(i).copied().unwrap_or(if i == 0 { "x" } else { "y" });
                    return Err(Error::ForbiddenPole(name.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Recentering `y -> z(x) + u`; the result is written in `(x, u)`.
    ///
    /// Requires nonnegative integral exponents of `y` and a center `z` with
    /// nonnegative exponents in `x` only.
    pub fn substitute_center(&self, z: &Self) -> Result<Self> {
        if z.terms.keys().any(|m| m[1] != 0 || m[0] < 0) {
            return Err(Error::Input("center must be a series in x with nonnegative exponents".into()));
        }
        let (arity, h, poles) = self.merged(z);
        let f = self.lift_h(h);
        let z = z.lift_h(h);
        let hh = h as i64;
        let mut powers: Vec<Self> = vec![Self::one().lift_h(h)];
        let mut out = Self::from_raw(arity.max(2), h, poles, std::iter::empty());
        let u = Self::from_raw(2, h, poles, [([0, hh], Rat::one())]);
        let zu = &z + &u;
        for (m, c) in &f.terms {
            if m[1] < 0 || m[1] % hh != 0 {
                return Err(Error::Input("recentering needs nonnegative integral powers of y".into()));
            }
            let k = (m[1] / hh) as usize;
            while powers.len() <= k {
                let next = powers.last().unwrap() * &zu;
                powers.push(next);
            }
            let xpart = Self::from_raw(2, h, poles, [([m[0], 0], c.clone())]);
            out = &out + &(&xpart * &powers[k]);
        }
        out.arity = 2;
        Ok(out)
    }

    /// Applies the monomial substitution `x^a y^b -> x^(m00 a + m01 b) y^(m10 a + m11 b)`.
    pub fn monomial_map(&self, mat: [[i64; 2]; 2]) -> Self {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(m, c)| ([mat[0][0] * m[0] + mat[0][1] * m[1], mat[1][0] * m[0] + mat[1][1] * m[1]], c.clone()))
            .collect();
        Self::from_raw(self.arity.max(2), self.h, [true, true], terms).with_poles_or(self.poles)
    }

    /// Substitutes `x -> x^k` (for a positive integer k) in variable `var`.
    pub fn power_substitute(&self, var: usize, k: i64) -> Self {
        let mut mat = [[1, 0], [0, 1]];
        mat[var][var] = k;
        let p = self.monomial_map(mat);
        PuiseuxPoly { arity: self.arity, poles: self.poles, ..p }
    }

    /// Specializes variable `var` to the rational value `v` (integral exponents required).
    pub fn eval_var(&self, var: usize, v: &Rat) -> Option<Self> {
        let hh = self.h as i64;
        let mut out = Self::from_raw(self.arity, self.h, self.poles, std::iter::empty());
        for (m, c) in &self.terms {
            if m[var] % hh != 0 || (v.is_zero() && m[var] < 0) {
                return None;
            }
            let e = m[var] / hh;
            let val = if e >= 0 { num_traits::pow(v.clone(), e as usize) } else { num_traits::pow(v.recip(), (-e) as usize) };
            let mut m2 = *m;
            m2[var] = 0;
            out.add_term(m2, c * val);
        }
        Some(out)
    }

    /// Exchanges the two variables.
    pub fn swap_vars(&self) -> Self {
        let terms: Vec<_> = self.terms.iter().map(|(m, c)| ([m[1], m[0]], c.clone())).collect();
        Self::from_raw(self.arity.max(2), self.h, [self.poles[1], self.poles[0]], terms)
    }

    /// Renders with the given variable names.
    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let exps = self.exps(m);
            let mut factors: Vec<String> = Vec::new();
            for (v, e) in exps.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let name = names.get(v).copied().unwrap_or(if v == 0 { "x" } else { "y" });
                if e.is_one() {
                    factors.push(name.to_string());
                } else if e.is_integer() {
                    factors.push(format!("{name}^{}", e.numer()));
                } else {
                    factors.push(format!("{name}^({})", fmt_rat(e)));
                }
            }
            let neg = c.is_negative();
            let a = c.abs();
            let coef = fmt_rat(&a);
            let body = if factors.is_empty() {
                coef
            } else if a.is_one() {
                factors.join("*")
            } else {
                format!("{coef}*{}", factors.join("*"))
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }

    /// Default variable names for the arity: `z` for one variable, `x, y` for two.
    pub fn default_names(&self) -> &'static [&'static str] {
        if self.arity == 1 {
            &["z"]
        } else {
            &["x", "y"]
        }
    }
}

fn to_i64_exact(r: &Rat) -> i64 {
    use num_traits::ToPrimitive;
    assert!(r.is_integer(), "non-integral exponent numerator");
    r.numer().to_i64().expect("exponent out of range")
}

impl fmt::Display for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(self.default_names()))
    }
}

impl PartialEq for PuiseuxPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.h == other.h {
            return self.terms == other.terms;
        }
        let h = lcm_u32(self.h, other.h);
        self.lift_h(h).terms == other.lift_h(h).terms
    }
}

impl Eq for PuiseuxPoly {}

impl<'a> Add<&'a PuiseuxPoly> for &'a PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn add(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        let (arity, h, poles) = self.merged(rhs);
        let mut out = self.lift_h(h);
        out.arity = arity;
        out.poles = poles;
        let k = (h / rhs.h) as i64;
        for (m, c) in &rhs.terms {
            out.add_term([m[0] * k, m[1] * k], c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a PuiseuxPoly> for &'a PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn sub(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        self + &(-rhs)
    }
}

impl Neg for &PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn neg(self) -> PuiseuxPoly {
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v = -v.clone();
        }
        p
    }
}

impl PuiseuxPoly {
    /// Product restricted to terms of total degree below `n`.
    pub fn mul_truncated(&self, rhs: &PuiseuxPoly, n: &Rat) -> PuiseuxPoly {
        let (arity, h, poles) = self.merged(rhs);
        let ka = (h / self.h) as i64;
        let kb = (h / rhs.h) as i64;
        // total degree (a + b) / h < n  <=>  a + b < n h
        let bound = n * Rat::from_integer((h as i64).into());
        let mut out = PuiseuxPoly { arity, h, poles, terms: BTreeMap::new() };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = [ma[0] * ka + mb[0] * kb, ma[1] * ka + mb[1] * kb];
                if Rat::from_integer((m[0] + m[1]).into()) < bound {
                    out.add_term(m, ca * cb);
                }
            }
        }
        out
    }
}

impl<'a> Mul<&'a PuiseuxPoly> for &'a PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn mul(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        let (arity, h, poles) = self.merged(rhs);
        let ka = (h / self.h) as i64;
        let kb = (h / rhs.h) as i64;
        let mut out = PuiseuxPoly { arity, h, poles, terms: BTreeMap::new() };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term([ma[0] * ka + mb[0] * kb, ma[1] * ka + mb[1] * kb], ca * cb);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<PuiseuxPoly> for PuiseuxPoly {
            type Output = PuiseuxPoly;
            fn $f(self, rhs: PuiseuxPoly) -> PuiseuxPoly { (&self).$f(&rhs) }
        }
        impl<'a> $tr<&'a PuiseuxPoly> for PuiseuxPoly {
            type Output = PuiseuxPoly;
            fn $f(self, rhs: &PuiseuxPoly) -> PuiseuxPoly { (&self).$f(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn neg(self) -> PuiseuxPoly {
        -&self
    }
}

impl Zero for PuiseuxPoly {
    fn zero() -> Self {
        PuiseuxPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for PuiseuxPoly {
    fn one() -> Self {
        PuiseuxPoly::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse::parse_poly;
    use crate::series::rat::ratq;

    fn p(s: &str) -> PuiseuxPoly {
        parse_poly(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn monomial_algebra() {
        assert_eq!(&p("x^-1 + y") * &p("x"), p("1 + x*y"));
        let f = p("3*x^-2 + y^3");
        assert!((&f + &(-&f)).is_zero());
        assert_eq!(&p("x^-3*y^-3") * &p("x*y"), p("x^-2*y^-2"));
    }

    #[test]
    fn gauss_norm_examples() {
        let f = p("x^-3*y^-3 + x^-1");
        assert_eq!(f.gauss_log_norm(&[rat(1), rat(1)]), Some(rat(6)));
        assert_eq!(f.gauss_log_norm(&[rat(1), rat(0)]), Some(rat(3)));
        assert_eq!(f.gauss_log_norm(&[rat(5), rat(0)]), Some(rat(15)));
        let g = parse_poly("x^-2", &["x"]).unwrap();
        assert_eq!(g.gauss_log_norm(&[rat(1)]), Some(rat(2)));
        assert_eq!(PuiseuxPoly::zero().gauss_log_norm(&[rat(1), rat(1)]), None);
    }

    #[test]
    fn exact_division_recovers_factor() {
        let a = p("x^-1*y + 2 - 3*x*y^2");
        let b = p("y^-1 + x^2 + 1/2*x*y");
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert!(p("x + 1").exact_div(&p("x - 1")).is_none());
    }

    #[test]
    fn center_substitution() {
        assert_eq!(p("y*x^-1").substitute_center(&PuiseuxPoly::zero()).unwrap(), p("y*x^-1"));
        let z = p("x^(3/2)");
        assert_eq!(p("y").substitute_center(&z).unwrap(), p("x^(3/2) + y"));
        assert_eq!(p("y^2").substitute_center(&p("x")).unwrap(), p("x^2 + 2*x*y + y^2"));
    }

    #[test]
    fn ramify_keeps_element() {
        let f = p("x^-1");
        let g = f.ramify(2);
        assert_eq!(g.h(), 2);
        assert_eq!(g, f);
        let s = p("x^(1/2)").ramify(3);
        assert_eq!(s.h(), 6);
        assert!(PuiseuxPoly::zero().ramify(5).is_zero());
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("x^-1").deriv(0), p("-x^-2"));
        assert_eq!(p("y*x^-1").deriv(0), p("-y*x^-2"));
        assert_eq!(p("y*x^-1").deriv(1), p("x^-1"));
        assert_eq!(p("x^(3/2)").deriv(0), p("3/2*x^(1/2)"));
        assert_eq!(p("x^-2*y + y^3").euler(&[rat(1), rat(2)]), p("0*x + 6*y^3"));
        assert_eq!(p("x^(1/2)").euler(&[ratq(2, 1), rat(0)]), p("x^(1/2)"));
    }

    #[test]
    fn monomial_maps() {
        // y = x v
        assert_eq!(p("y*x^-1").monomial_map([[1, 1], [0, 1]]), p("y"));
        // x = u y (u first variable, y second)
        assert_eq!(p("y*x^-1").monomial_map([[1, 0], [1, 1]]), p("x^-1"));
    }
}
