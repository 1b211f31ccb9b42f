//! Twisted polynomials `F{T}` with `T r = r T + D(r)`, cyclic vectors, and
//! Newton polygons relative to a weight.
//!
//! The derivation `D` is always a weighted Euler derivation
//! `w0 x d/dx + w1 y d/dy` (or `z d/dz` in one variable); every such
//! derivation has operator and spectral norm 1 for the Gauss norms used here,
//! so the polygon cap is `0`.

mod cyclic;
mod factor;
mod ratfn;

pub use cyclic::{cyclic_vector, cyclic_vector_with, CyclicVector};
pub use factor::slope_factor;
pub use ratfn::RationalFunction;

use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::series::{fmt_rat, rat, PuiseuxPoly, Rat, TruncatedSeries};

/// Coefficient domain of a twisted polynomial.
pub trait DiffCoeff: Clone + PartialEq + fmt::Debug {
    fn c_zero() -> Self;
    fn c_one() -> Self;
    fn c_is_zero(&self) -> bool;
    fn c_add(&self, o: &Self) -> Self;
    fn c_neg(&self) -> Self;
    fn c_mul(&self, o: &Self) -> Self;
    fn c_sub(&self, o: &Self) -> Self {
        self.c_add(&o.c_neg())
    }
    fn c_scale(&self, k: &Rat) -> Self;
    /// Weighted Euler derivation.
    fn derive(&self, w: &[Rat; 2]) -> Self;
    /// `log|c|_r`; `None` encodes `-inf`.
    fn log_norm(&self, r: &[Rat]) -> Option<Rat>;
    fn render(&self, names: &[&str]) -> String;
}

impl DiffCoeff for RationalFunction {
    fn c_zero() -> Self {
        RationalFunction::constant(Rat::zero())
    }
    fn c_one() -> Self {
        RationalFunction::constant(Rat::one())
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn c_neg(&self) -> Self {
        self.neg()
    }
    fn c_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn c_scale(&self, k: &Rat) -> Self {
        self.mul(&RationalFunction::constant(k.clone()))
    }
    fn derive(&self, w: &[Rat; 2]) -> Self {
        self.euler(w)
    }
    fn log_norm(&self, r: &[Rat]) -> Option<Rat> {
        RationalFunction::log_norm(self, r)
    }
    fn render(&self, names: &[&str]) -> String {
        self.to_string_with(names)
    }
}

impl DiffCoeff for PuiseuxPoly {
    fn c_zero() -> Self {
        PuiseuxPoly::zero()
    }
    fn c_one() -> Self {
        PuiseuxPoly::one()
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_add(&self, o: &Self) -> Self {
        self + o
    }
    fn c_neg(&self) -> Self {
        -self
    }
    fn c_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn c_scale(&self, k: &Rat) -> Self {
        self.scale(k)
    }
    fn derive(&self, w: &[Rat; 2]) -> Self {
        self.euler(w)
    }
    fn log_norm(&self, r: &[Rat]) -> Option<Rat> {
        self.gauss_log_norm(r)
    }
    fn render(&self, names: &[&str]) -> String {
        self.to_string_with(names)
    }
}

/// Over `Q((z))` the log-norm is minus the `z`-adic valuation (`r = (1)`);
/// a body that vanishes to the known precision counts as zero.
impl DiffCoeff for TruncatedSeries {
    fn c_zero() -> Self {
        TruncatedSeries::exact(PuiseuxPoly::zero())
    }
    fn c_one() -> Self {
        TruncatedSeries::exact(PuiseuxPoly::one())
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero_to_precision()
    }
    fn c_add(&self, o: &Self) -> Self {
        self + o
    }
    fn c_neg(&self) -> Self {
        -self
    }
    fn c_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn c_scale(&self, k: &Rat) -> Self {
        self.scale(k)
    }
    fn derive(&self, w: &[Rat; 2]) -> Self {
        self.euler(w)
    }
    fn log_norm(&self, r: &[Rat]) -> Option<Rat> {
        let v = self.valuation()?;
        Some(-v * r.first().cloned().unwrap_or_else(|| rat(1)))
    }
    fn render(&self, names: &[&str]) -> String {
        let body = self.body().to_string_with(names);
        match self.precision() {
            Some(n) => format!("{body} + O({}^{})", names[0], fmt_rat(n)),
            None => body,
        }
    }
}

/// Polynomial `sum P_i T^i` (coefficients on the left) for the derivation
/// with Euler weights `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedPoly<C: DiffCoeff> {
    coeffs: Vec<C>,
    w: [Rat; 2],
}

fn binomial(n: usize, k: usize) -> Rat {
    let mut b = Rat::one();
    for i in 0..k {
        b = b * rat((n - i) as i64) / rat((i + 1) as i64);
    }
    b
}

impl<C: DiffCoeff> TwistedPoly<C> {
    /// Coefficients from `P_0` up; exact trailing zeros are trimmed.
    pub fn new(coeffs: Vec<C>, w: [Rat; 2]) -> Self {
        let mut p = TwistedPoly { coeffs, w };
        p.trim();
        p
    }

    /// Monic polynomial `T^d + sum_{i<d} lower[i] T^i`.
    pub fn monic(mut lower: Vec<C>, w: [Rat; 2]) -> Self {
        lower.push(C::c_one());
        TwistedPoly { coeffs: lower, w }
    }

    /// `T - a`.
    pub fn linear(a: C, w: [Rat; 2]) -> Self {
        Self::monic(vec![a.c_neg()], w)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.c_is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(C::c_zero());
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::c_zero)
    }

    pub fn weights(&self) -> &[Rat; 2] {
        &self.w
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.c_sub(&C::c_one()).c_is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).c_add(&o.coeff(i))).collect(), self.w.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).c_sub(&o.coeff(i))).collect(), self.w.clone())
    }

    /// Left multiplication by a scalar.
    pub fn left_scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| c.c_mul(a)).collect(), self.w.clone())
    }

    /// Product under `T^i r = sum_k C(i,k) D^k(r) T^(i-k)`.
    pub fn twisted_mul(&self, o: &Self) -> Self {
        let dp = self.degree();
        let dq = o.degree();
        let mut out = vec![C::c_zero(); dp + dq + 1];
        for (j, qj) in o.coeffs.iter().enumerate() {
            if qj.c_is_zero() {
                continue;
            }
            let mut ders = vec![qj.clone()];
            for k in 1..=dp {
                let next = ders[k - 1].derive(&self.w);
                ders.push(next);
            }
            for (i, pi) in self.coeffs.iter().enumerate() {
                if pi.c_is_zero() {
                    continue;
                }
                for (k, dk) in ders.iter().enumerate().take(i + 1) {
                    if dk.c_is_zero() {
                        continue;
                    }
                    let term = pi.c_mul(dk).c_scale(&binomial(i, k));
                    let idx = i - k + j;
                    out[idx] = out[idx].c_add(&term);
                }
            }
        }
        Self::new(out, self.w.clone())
    }

    /// `P(T + psi) = sum P_i (T + psi)^i`.
    pub fn substitute_shift(&self, psi: &C) -> Self {
        let t_psi = Self::new(vec![psi.clone(), C::c_one()], self.w.clone());
        let mut power = Self::new(vec![C::c_one()], self.w.clone());
        let mut acc = Self::new(vec![C::c_zero()], self.w.clone());
        for (i, pi) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.twisted_mul(&t_psi);
            }
            acc = acc.add(&power.left_scale(pi));
        }
        acc
    }

    pub fn map_coeffs<D: DiffCoeff>(&self, f: impl Fn(&C) -> D) -> TwistedPoly<D> {
        TwistedPoly::new(self.coeffs.iter().map(f).collect(), self.w.clone())
    }

    pub fn to_string_with(&self, names: &[&str]) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.c_is_zero() {
                continue;
            }
            let t = match i {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{i}"),
            };
            let cs = c.render(names);
            parts.push(match (cs.as_str(), i) {
                ("1", k) if k > 0 => t,
                (_, 0) => format!("({cs})"),
                _ => format!("({cs})*{t}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl<C: DiffCoeff> fmt::Display for TwistedPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&["x", "y"]))
    }
}

/// Capped lower convex hull of `{(-i, -log|P_i|)}` for a monic `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon {
    pub weight: Vec<Rat>,
    pub cap: Rat,
    /// Hull vertices `(x, y)` before capping, left to right.
    pub vertices: Vec<(i64, Rat)>,
    /// `(slope, multiplicity)`, slopes strictly increasing, all `<= cap`.
    pub slopes: Vec<(Rat, usize)>,
}

impl NewtonPolygon {
    pub fn degree(&self) -> usize {
        self.slopes.iter().map(|(_, m)| m).sum()
    }

    /// Log-scales `cap - slope` with multiplicity, sorted descending.
    pub fn log_scales(&self) -> Vec<Rat> {
        scale_multiset_from_polygon(self)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "weight": self.weight.iter().map(fmt_rat).collect::<Vec<_>>(),
            "cap": fmt_rat(&self.cap),
            "vertices": self.vertices.iter().map(|(x, y)| json!([x.to_string(), fmt_rat(y)])).collect::<Vec<_>>(),
            "slopes": self.slopes.iter().map(|(s, m)| json!({"slope": fmt_rat(s), "multiplicity": m})).collect::<Vec<_>>(),
        })
    }
}

/// Lower convex hull (x strictly increasing input).
pub(crate) fn lower_hull(points: &[(i64, Rat)]) -> Vec<(i64, Rat)> {
    let mut hull: Vec<(i64, Rat)> = Vec::new();
    for p in points {
        while hull.len() >= 2 {
            let (x1, y1) = &hull[hull.len() - 2];
            let (x2, y2) = &hull[hull.len() - 1];
            // drop (x2,y2) if it lies on or above the segment from (x1,y1) to p
            let lhs = (y2 - y1) * rat(p.0 - x1);
            let rhs = (&p.1 - y1) * rat(x2 - x1);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    hull
}

/// Newton polygon of a monic `P` at weight `r`.
pub fn newton_polygon<C: DiffCoeff>(p: &TwistedPoly<C>, r: &[Rat]) -> NewtonPolygon {
    let cap = Rat::zero();
    let d = p.degree();
    let mut pts: Vec<(i64, Rat)> = Vec::new();
    for i in (0..=d).rev() {
        if let Some(l) = p.coeff(i).log_norm(r) {
            pts.push((-(i as i64), -l));
        }
    }
    let vertices = lower_hull(&pts);
    let mut slopes: Vec<(Rat, usize)> = Vec::new();
    let push = |s: Rat, m: usize, slopes: &mut Vec<(Rat, usize)>| {
        let s = if s > cap { cap.clone() } else { s };
        match slopes.last_mut() {
            Some((t, k)) if *t == s => *k += m,
            _ => slopes.push((s, m)),
        }
    };
    for win in vertices.windows(2) {
        let dx = win[1].0 - win[0].0;
        let s = (&win[1].1 - &win[0].1) / rat(dx);
        push(s, dx as usize, &mut slopes);
    }
    // vanishing low coefficients: infinite slopes, capped
    let last_x = vertices.last().map_or(-(d as i64), |v| v.0);
    if last_x < 0 {
        push(cap.clone(), (-last_x) as usize, &mut slopes);
    }
    NewtonPolygon { weight: r.to_vec(), cap, vertices, slopes }
}

/// Log-scales `cap - slope` (each `>= 0`), sorted in decreasing order.
pub fn scale_multiset_from_polygon(np: &NewtonPolygon) -> Vec<Rat> {
    let mut out = Vec::new();
    for (s, m) in &np.slopes {
        let v = &np.cap - s;
        out.extend(std::iter::repeat(v).take(*m));
    }
    out.sort_by(|a, b| b.cmp(a));
    out
}

#[cfg(test)]
mod tests;
