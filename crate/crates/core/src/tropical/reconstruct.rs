//! Exact reconstruction of convex piecewise-affine functions from an exact
//! evaluation oracle.
//!
//! For a convex function, three collinear values `g(t), g(t+d), g(t+2d)`
//! certify that `g` is affine on `[t, t+2d]`; one-sided slopes are found by
//! halving `d` until that happens.  Two tangent lines are then intersected;
//! if the oracle agrees with the tangent value at the intersection the
//! interval is finished, otherwise it is split there and both halves are
//! treated recursively.  Every piece is therefore certified by exact values.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{AffineFunctional, PLFunction, Piece, Piecewise1D};
use crate::error::{Error, Result};
use crate::series::{rat, Rat};

/// Limits for the reconstruction loop.
#[derive(Clone, Debug)]
pub struct Budget {
    pub max_evals: usize,
    pub max_halvings: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_evals: 20_000, max_halvings: 80 }
    }
}

struct Oracle<'a, F> {
    g: &'a mut F,
    memo: BTreeMap<Rat, Rat>,
    budget: &'a Budget,
}

impl<F: FnMut(&Rat) -> Result<Rat>> Oracle<'_, F> {
    fn at(&mut self, t: &Rat) -> Result<Rat> {
        if let Some(v) = self.memo.get(t) {
            return Ok(v.clone());
        }
        if self.memo.len() >= self.budget.max_evals {
            return Err(Error::BudgetExhausted("piecewise-linear reconstruction: evaluation budget".into()));
        }
        let v = (self.g)(t)?;
        self.memo.insert(t.clone(), v.clone());
        Ok(v)
    }

    /// Slope of the affine piece starting at `t` (towards `u > t`).
    fn right_slope(&mut self, t: &Rat, u: &Rat) -> Result<Rat> {
        let mut d = (u - t) / rat(2);
        let a = self.at(t)?;
        for _ in 0..self.budget.max_halvings {
            let b = self.at(&(t + &d))?;
            let c = self.at(&(t + &d * rat(2)))?;
            if &b - &a == &c - &b {
                return Ok((b - a) / d);
            }
            d /= rat(2);
        }
        Err(Error::BudgetExhausted("piecewise-linear reconstruction: slope did not stabilise".into()))
    }

    /// Slope of the affine piece ending at `u` (coming from `l < u`).
    fn left_slope(&mut self, l: &Rat, u: &Rat) -> Result<Rat> {
        let mut d = (u - l) / rat(2);
        let a = self.at(u)?;
        for _ in 0..self.budget.max_halvings {
            let b = self.at(&(u - &d))?;
            let c = self.at(&(u - &d * rat(2)))?;
            if &b - &a == &c - &b {
                return Ok((a - b) / d);
            }
            d /= rat(2);
        }
        Err(Error::BudgetExhausted("piecewise-linear reconstruction: slope did not stabilise".into()))
    }
}

/// Reconstructs a convex piecewise-affine `g` on `[t0, t1]` exactly.
pub fn reconstruct_convex<F>(mut g: F, t0: &Rat, t1: &Rat, budget: &Budget) -> Result<Piecewise1D>
where
    F: FnMut(&Rat) -> Result<Rat>,
{
    assert!(t0 < t1);
    let mut o = Oracle { g: &mut g, memo: BTreeMap::new(), budget };
    let sl = o.right_slope(t0, t1)?;
    let su = o.left_slope(t0, t1)?;
    let gl = o.at(t0)?;
    let gu = o.at(t1)?;
    // Work list of intervals (l, g(l), right slope at l, u, g(u), left slope at u).
    let mut stack = vec![(t0.clone(), gl, sl, t1.clone(), gu, su)];
    let mut pieces: Vec<Piece> = Vec::new();
    while let Some((l, gl, sl, u, gu, su)) = stack.pop() {
        if sl == su {
            if gu != &gl + &sl * (&u - &l) {
                return Err(Error::Precondition("function is not convex piecewise-affine".into()));
            }
            pieces.push(Piece { t0: l, t1: u, v0: gl, slope: sl });
            continue;
        }
        if sl > su {
            return Err(Error::Precondition("function is not convex".into()));
        }
        // Intersection of the two tangent lines.
        let m = (&gu - &gl + &sl * &l - &su * &u) / (&sl - &su);
        let vm = &gl + &sl * (&m - &l);
        let gm = o.at(&m)?;
        if gm == vm {
            pieces.push(Piece { t0: l.clone(), t1: m.clone(), v0: gl, slope: sl });
            pieces.push(Piece { t0: m, t1: u, v0: gm, slope: su });
            continue;
        }
        if gm < vm {
            return Err(Error::Precondition("function is not convex".into()));
        }
        let sml = o.left_slope(&l, &m)?;
        let smr = o.right_slope(&m, &u)?;
        stack.push((m.clone(), gm.clone(), smr, u, gu, su));
        stack.push((l, gl, sl, m, gm, sml));
    }
    pieces.sort_by(|a, b| a.t0.cmp(&b.t0));
    Ok(Piecewise1D::from_pieces(pieces))
}

/// Reconstructs a convex, positively homogeneous PL function on the quadrant
/// from exact values, via the segment `(1 - t, t)`, `t in [0, 1]`.
pub fn reconstruct_convex_on_cone<F>(mut f: F, budget: &Budget) -> Result<PLFunction>
where
    F: FnMut(&[Rat; 2]) -> Result<Rat>,
{
    let one = rat(1);
    let g = reconstruct_convex(|t| f(&[&one - t, t.clone()]), &Rat::zero(), &one, budget)?;
    let fs = g
        .pieces()
        .iter()
        .map(|p| {
            // v0 + s (t - t0) = alpha (1 - t) + beta t
            let alpha = &p.v0 - &p.slope * &p.t0;
            let beta = &alpha + &p.slope;
            AffineFunctional::linear(alpha, beta)
        })
        .collect();
    Ok(PLFunction::new(fs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ratq;

    #[test]
    fn recovers_known_function() {
        // max{3 - 2q, 2 - q, 0} on [0, 8]
        let f = |q: &Rat| -> Result<Rat> {
            Ok([rat(3) - q * rat(2), rat(2) - q, rat(0)].into_iter().max().unwrap())
        };
        let g = reconstruct_convex(f, &rat(0), &rat(8), &Budget::default()).unwrap();
        assert_eq!(g.breakpoints(), vec![rat(1), rat(2)]);
        assert_eq!(g.slopes(), vec![rat(-2), rat(-1), rat(0)]);
    }

    #[test]
    fn recovers_cone_function() {
        let f = |r: &[Rat; 2]| -> Result<Rat> {
            let a = &r[0] * rat(24) + &r[1] * rat(24);
            Ok(a + std::cmp::max(r[0].clone(), r[1].clone()))
        };
        let p = reconstruct_convex_on_cone(f, &Budget::default()).unwrap();
        assert_eq!(p.functionals().len(), 2);
        assert!(p.functionals().contains(&AffineFunctional::linear(rat(25), rat(24))));
        assert!(p.functionals().contains(&AffineFunctional::linear(rat(24), rat(25))));
    }

    #[test]
    fn odd_breakpoint() {
        let f = |q: &Rat| -> Result<Rat> { Ok(std::cmp::max(rat(0), rat(3) - q * rat(7))) };
        let g = reconstruct_convex(f, &rat(0), &rat(5), &Budget::default()).unwrap();
        assert_eq!(g.breakpoints(), vec![ratq(3, 7)]);
    }

    #[test]
    fn rejects_nonconvex() {
        let f = |q: &Rat| -> Result<Rat> { Ok(std::cmp::min(rat(0), q - rat(1))) };
        assert!(reconstruct_convex(f, &rat(0), &rat(4), &Budget::default()).is_err());
    }
}
