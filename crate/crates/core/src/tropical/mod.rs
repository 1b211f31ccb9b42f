//! Exact piecewise-linear functions on the weight cone `[0, inf)^2`.
//!
//! A [`PLFunction`] is the pointwise maximum of rational affine functionals;
//! a [`DiffPL`] is a formal difference of two of them.  Dominance, linearity
//! and segment restriction are decided exactly from the finitely many
//! vertices and extreme rays of the functional arrangement inside the cone.

mod oned;
mod reconstruct;

pub use oned::{Piece, Piecewise1D};
pub use reconstruct::{reconstruct_convex, reconstruct_convex_on_cone, Budget};

use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::series::{fmt_rat, rat, Rat};

/// `a1 * r1 + a2 * r2 + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineFunctional {
    pub a1: Rat,
    pub a2: Rat,
    pub c: Rat,
}

impl AffineFunctional {
    pub fn new(a1: Rat, a2: Rat, c: Rat) -> Self {
        AffineFunctional { a1, a2, c }
    }

    /// Homogeneous functional `a1 r1 + a2 r2`.
    pub fn linear(a1: Rat, a2: Rat) -> Self {
        AffineFunctional { a1, a2, c: Rat::zero() }
    }

    pub fn zero() -> Self {
        Self::linear(Rat::zero(), Rat::zero())
    }

    pub fn eval(&self, r: &[Rat; 2]) -> Rat {
        &self.a1 * &r[0] + &self.a2 * &r[1] + &self.c
    }

    /// Value of the linear part on a direction.
    pub fn slope_along(&self, d: &[Rat; 2]) -> Rat {
        &self.a1 * &d[0] + &self.a2 * &d[1]
    }

    pub fn add(&self, o: &Self) -> Self {
        AffineFunctional { a1: &self.a1 + &o.a1, a2: &self.a2 + &o.a2, c: &self.c + &o.c }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        AffineFunctional { a1: &self.a1 * k, a2: &self.a2 * k, c: &self.c * k }
    }

    pub fn to_json(&self) -> Value {
        json!({"a1": fmt_rat(&self.a1), "a2": fmt_rat(&self.a2), "c": fmt_rat(&self.c)})
    }
}

impl fmt::Display for AffineFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (a, v) in [(&self.a1, "r1"), (&self.a2, "r2")] {
            if !a.is_zero() {
                parts.push(if *a == rat(1) { v.to_string() } else { format!("{}*{v}", fmt_rat(a)) });
            }
        }
        if !self.c.is_zero() || parts.is_empty() {
            parts.push(fmt_rat(&self.c));
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

/// Maximum of finitely many affine functionals on the quadrant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunction {
    functionals: Vec<AffineFunctional>,
}

/// Result of a linearity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linearity {
    pub linear: bool,
    /// For non-linear functions: weights at which different functionals win strictly.
    pub witnesses: Vec<[Rat; 2]>,
}

fn quadrant_points_and_rays(fs: &[AffineFunctional]) -> (Vec<[Rat; 2]>, Vec<[Rat; 2]>) {
    let z = Rat::zero;
    let mut pts = vec![[z(), z()]];
    let mut rays = vec![[rat(1), z()], [z(), rat(1)]];
    let n = fs.len();
    // Lines {f_i = f_j}: (a1i-a1j) r1 + (a2i-a2j) r2 + (ci-cj) = 0.
    let lines: Vec<(Rat, Rat, Rat)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (&fs[i].a1 - &fs[j].a1, &fs[i].a2 - &fs[j].a2, &fs[i].c - &fs[j].c))
        .filter(|(a, b, _)| !(a.is_zero() && b.is_zero()))
        .collect();
    let inside = |p: &[Rat; 2]| !p[0].is_negative() && !p[1].is_negative();
    for (a, b, c) in &lines {
        // Axis intersections.
        if !a.is_zero() {
            let p = [-c / a, z()];
            if inside(&p) {
                pts.push(p);
            }
        }
        if !b.is_zero() {
            let p = [z(), -c / b];
            if inside(&p) {
                pts.push(p);
            }
        }
        // Recession direction of the line inside the quadrant: a d1 + b d2 = 0.
        let d = [b.clone(), -a.clone()];
        for dd in [d.clone(), [-&d[0], -&d[1]]] {
            if inside(&dd) && !(dd[0].is_zero() && dd[1].is_zero()) {
                rays.push(dd);
            }
        }
    }
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, c1) = &lines[i];
            let (a2, b2, c2) = &lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.is_zero() {
                continue;
            }
            let p = [(b1 * c2 - b2 * c1) / &det, (a2 * c1 - a1 * c2) / &det];
            if inside(&p) {
                pts.push(p);
            }
        }
    }
    pts.sort();
    pts.dedup();
    rays.sort();
    rays.dedup();
    (pts, rays)
}

impl PLFunction {
    pub fn new(functionals: Vec<AffineFunctional>) -> Self {
        assert!(!functionals.is_empty(), "a PL function needs at least one functional");
        PLFunction { functionals }
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![AffineFunctional::new(Rat::zero(), Rat::zero(), c)])
    }

    pub fn zero() -> Self {
        Self::constant(Rat::zero())
    }

    pub fn functionals(&self) -> &[AffineFunctional] {
        &self.functionals
    }

    pub fn eval(&self, r: &[Rat; 2]) -> Rat {
        self.functionals.iter().map(|f| f.eval(r)).max().unwrap()
    }

    pub fn combine_max(&self, g: &Self) -> Self {
        let mut v = self.functionals.clone();
        v.extend(g.functionals.iter().cloned());
        Self::new(v).canonicalize()
    }

    pub fn combine_sum(&self, g: &Self) -> Self {
        let mut v = Vec::new();
        for a in &self.functionals {
            for b in &g.functionals {
                v.push(a.add(b));
            }
        }
        Self::new(v).canonicalize()
    }

    /// Positive part of `f_k - max_{j != k} f_j` somewhere on the quadrant:
    /// returns a weight where `f_k` strictly beats all others.
    fn strict_win_point(fs: &[AffineFunctional], k: usize) -> Option<[Rat; 2]> {
        let others: Vec<&AffineFunctional> = fs.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, f)| f).collect();
        if others.is_empty() {
            return Some([Rat::zero(), Rat::zero()]);
        }
        let (pts, rays) = quadrant_points_and_rays(fs);
        let gap = |r: &[Rat; 2]| fs[k].eval(r) - others.iter().map(|f| f.eval(r)).max().unwrap();
        for p in &pts {
            if gap(p).is_positive() {
                return Some(p.clone());
            }
        }
        for d in &rays {
            let slope = fs[k].slope_along(d) - others.iter().map(|f| f.slope_along(d)).max().unwrap();
            if slope.is_positive() {
                // The gap is concave along the ray and eventually positive.
                let mut t = rat(1);
                loop {
                    let p = [&d[0] * &t, &d[1] * &t];
                    if gap(&p).is_positive() {
                        return Some(p);
                    }
                    t *= rat(2);
                }
            }
        }
        None
    }

    /// Minimal functional set with the same values on the quadrant.
    pub fn canonicalize(&self) -> Self {
        let mut fs = self.functionals.clone();
        fs.sort();
        fs.dedup();
        let mut k = 0;
        while k < fs.len() {
            if fs.len() > 1 && Self::strict_win_point(&fs, k).is_none() {
                fs.remove(k);
            } else {
                k += 1;
            }
        }
        PLFunction { functionals: fs }
    }

    pub fn is_linear_on_cone(&self) -> Linearity {
        let c = self.canonicalize();
        if c.functionals.len() == 1 {
            return Linearity { linear: true, witnesses: vec![] };
        }
        let witnesses = (0..c.functionals.len()).filter_map(|k| Self::strict_win_point(&c.functionals, k)).collect();
        Linearity { linear: false, witnesses }
    }

    /// Single functional when the function is linear.
    pub fn as_single(&self) -> Option<AffineFunctional> {
        let c = self.canonicalize();
        if c.functionals.len() == 1 {
            Some(c.functionals[0].clone())
        } else {
            None
        }
    }

    /// Restriction to `r(t) = base + t * dir` for `t in [t0, t1]`.
    pub fn restrict_to_line(&self, base: &[Rat; 2], dir: &[Rat; 2], t0: &Rat, t1: &Rat) -> Piecewise1D {
        let lines: Vec<(Rat, Rat)> = self.functionals.iter().map(|f| (f.eval(base), f.slope_along(dir))).collect();
        Piecewise1D::upper_envelope(&lines, t0, t1)
    }

    /// Restriction to the segment from `a` to `b`, parametrised by `t in [0, 1]`.
    pub fn restrict_to_segment(&self, a: &[Rat; 2], b: &[Rat; 2]) -> Piecewise1D {
        let dir = [&b[0] - &a[0], &b[1] - &a[1]];
        self.restrict_to_line(a, &dir, &Rat::zero(), &rat(1))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "domain": "quadrant",
            "functionals": self.functionals.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for PLFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.functionals.len() == 1 {
            write!(f, "{}", self.functionals[0])
        } else {
            let parts: Vec<String> = self.functionals.iter().map(|x| x.to_string()).collect();
            write!(f, "max{{{}}}", parts.join(", "))
        }
    }
}

/// Formal difference `P - Q` of two PL functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffPL {
    pub plus: PLFunction,
    pub minus: PLFunction,
}

impl DiffPL {
    pub fn new(plus: PLFunction, minus: PLFunction) -> Self {
        DiffPL { plus, minus }
    }

    pub fn eval(&self, r: &[Rat; 2]) -> Rat {
        self.plus.eval(r) - self.minus.eval(r)
    }

    pub fn restrict_to_line(&self, base: &[Rat; 2], dir: &[Rat; 2], t0: &Rat, t1: &Rat) -> Piecewise1D {
        let p = self.plus.restrict_to_line(base, dir, t0, t1);
        let q = self.minus.restrict_to_line(base, dir, t0, t1);
        p.sub(&q)
    }

    pub fn restrict_to_segment(&self, a: &[Rat; 2], b: &[Rat; 2]) -> Piecewise1D {
        let dir = [&b[0] - &a[0], &b[1] - &a[1]];
        self.restrict_to_line(a, &dir, &Rat::zero(), &rat(1))
    }

    pub fn to_json(&self) -> Value {
        json!({"plus": self.plus.to_json(), "minus": self.minus.to_json()})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ratq;

    fn lin(a: i64, b: i64) -> AffineFunctional {
        AffineFunctional::linear(rat(a), rat(b))
    }

    fn w(a: i64, b: i64) -> [Rat; 2] {
        [rat(a), rat(b)]
    }

    #[test]
    fn evaluation() {
        let f = PLFunction::new(vec![lin(3, 3), lin(1, 0)]);
        assert_eq!(f.eval(&w(1, 1)), rat(6));
        assert_eq!(PLFunction::zero().eval(&w(7, 3)), rat(0));
        assert_eq!(PLFunction::new(vec![lin(1, 0), lin(0, 1)]).eval(&w(2, 5)), rat(5));
    }

    #[test]
    fn combination() {
        let a = PLFunction::new(vec![lin(1, 0)]);
        let b = PLFunction::new(vec![lin(0, 1)]);
        assert_eq!(a.combine_sum(&b), PLFunction::new(vec![lin(1, 1)]));
        assert_eq!(a.combine_max(&b).functionals().len(), 2);
        assert_eq!(a.combine_sum(&PLFunction::zero()), a);
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(PLFunction::new(vec![lin(1, 0), lin(1, 0)]).canonicalize(), PLFunction::new(vec![lin(1, 0)]));
        assert_eq!(PLFunction::new(vec![lin(1, 1), lin(1, 0)]).canonicalize(), PLFunction::new(vec![lin(1, 1)]));
        let mid = AffineFunctional::linear(ratq(1, 2), ratq(1, 2));
        let c = PLFunction::new(vec![lin(1, 0), lin(0, 1), mid]).canonicalize();
        assert_eq!(c.functionals().len(), 2);
        // Affine functionals with constants: max{r1, 1} keeps both.
        let g = PLFunction::new(vec![lin(1, 0), AffineFunctional::new(rat(0), rat(0), rat(1))]).canonicalize();
        assert_eq!(g.functionals().len(), 2);
    }

    #[test]
    fn linearity_witnesses() {
        assert!(PLFunction::new(vec![lin(10, 10)]).is_linear_on_cone().linear);
        let l = PLFunction::new(vec![lin(1, 0), lin(0, 1)]).is_linear_on_cone();
        assert!(!l.linear);
        assert!(l.witnesses.contains(&w(1, 0)) && l.witnesses.contains(&w(0, 1)));
        assert!(PLFunction::new(vec![lin(1, 1), lin(1, 0)]).is_linear_on_cone().linear);
    }

    #[test]
    fn segment_restriction() {
        let f = PLFunction::new(vec![lin(3, 3), lin(1, 0)]);
        let g = f.restrict_to_line(&w(1, 0), &w(0, 1), &rat(0), &rat(2));
        assert!(g.is_affine());
        assert_eq!(g.eval(&rat(2)), rat(9));
        let h = PLFunction::new(vec![
            AffineFunctional::new(rat(0), rat(0), rat(0)),
            AffineFunctional::new(rat(0), rat(-1), rat(1)),
        ]);
        let p = h.restrict_to_line(&w(0, 0), &w(0, 1), &rat(0), &rat(2));
        assert_eq!(p.breakpoints(), vec![rat(1)]);
        assert_eq!(p.slopes(), vec![rat(-1), rat(0)]);
        assert_eq!(PLFunction::constant(rat(4)).restrict_to_segment(&w(0, 0), &w(1, 1)).slopes(), vec![rat(0)]);
    }

    #[test]
    fn difference_restriction() {
        let p = PLFunction::new(vec![lin(2, 1), lin(1, 2)]);
        let q = PLFunction::new(vec![lin(1, 1)]);
        let d = DiffPL::new(p, q).restrict_to_segment(&w(1, 0), &w(0, 1));
        assert_eq!(d.breakpoints(), vec![ratq(1, 2)]);
        assert_eq!(d.slopes(), vec![rat(-1), rat(1)]);
    }
}
