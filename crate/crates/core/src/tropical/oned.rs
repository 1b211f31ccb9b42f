//! One-dimensional piecewise-affine functions with exact breakpoints.

use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::series::{fmt_rat, Rat};

/// Affine piece `v0 + slope * (t - t0)` on `[t0, t1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub t0: Rat,
    pub t1: Rat,
    pub v0: Rat,
    pub slope: Rat,
}

impl Piece {
    pub fn eval(&self, t: &Rat) -> Rat {
        &self.v0 + &self.slope * (t - &self.t0)
    }

    pub fn v1(&self) -> Rat {
        self.eval(&self.t1)
    }
}

/// Contiguous pieces; adjacent pieces always have different slopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piecewise1D {
    pieces: Vec<Piece>,
}

impl Piecewise1D {
    /// Builds from contiguous pieces, merging neighbours with equal slope.
    pub fn from_pieces(pieces: Vec<Piece>) -> Self {
        assert!(!pieces.is_empty());
        let mut out: Vec<Piece> = Vec::new();
        for p in pieces {
            if p.t0 == p.t1 {
                continue;
            }
            if let Some(last) = out.last_mut() {
                debug_assert_eq!(last.t1, p.t0);
                if last.slope == p.slope {
                    last.t1 = p.t1;
                    continue;
                }
            }
            out.push(p);
        }
        Piecewise1D { pieces: out }
    }

    /// Upper envelope of lines `v + s t` on `[t0, t1]`.
    pub fn upper_envelope(lines: &[(Rat, Rat)], t0: &Rat, t1: &Rat) -> Self {
        assert!(!lines.is_empty() && t0 < t1);
        let val = |i: usize, t: &Rat| &lines[i].0 + &lines[i].1 * t;
        // Start: highest value at t0, ties broken by the larger slope.
        let mut cur = (0..lines.len()).max_by(|&a, &b| (val(a, t0), &lines[a].1).cmp(&(val(b, t0), &lines[b].1))).unwrap();
        let mut t = t0.clone();
        let mut pieces = Vec::new();
        loop {
            // Next line to overtake: smallest crossing after t among steeper lines.
            let mut best: Option<(Rat, usize)> = None;
            for j in 0..lines.len() {
                if lines[j].1 <= lines[cur].1 {
                    continue;
                }
                let x = (&lines[cur].0 - &lines[j].0) / (&lines[j].1 - &lines[cur].1);
                if x < t {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((bx, bj)) => x < *bx || (x == *bx && lines[j].1 > lines[*bj].1),
                };
                if better {
                    best = Some((x, j));
                }
            }
            match best {
                Some((x, j)) if x < *t1 => {
                    if x > t {
                        pieces.push(Piece { t0: t.clone(), t1: x.clone(), v0: val(cur, &t), slope: lines[cur].1.clone() });
                        t = x;
                    }
                    cur = j;
                }
                _ => {
                    pieces.push(Piece { t0: t.clone(), t1: t1.clone(), v0: val(cur, &t), slope: lines[cur].1.clone() });
                    break;
                }
            }
        }
        Self::from_pieces(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn start(&self) -> &Rat {
        &self.pieces[0].t0
    }

    pub fn end(&self) -> &Rat {
        &self.pieces.last().unwrap().t1
    }

    pub fn eval(&self, t: &Rat) -> Rat {
        let p = self.pieces.iter().find(|p| *t <= p.t1).unwrap_or_else(|| self.pieces.last().unwrap());
        p.eval(t)
    }

    /// Interior breakpoints (where the slope changes).
    pub fn breakpoints(&self) -> Vec<Rat> {
        self.pieces.iter().skip(1).map(|p| p.t0.clone()).collect()
    }

    pub fn slopes(&self) -> Vec<Rat> {
        self.pieces.iter().map(|p| p.slope.clone()).collect()
    }

    pub fn is_affine(&self) -> bool {
        self.pieces.len() == 1
    }

    /// Slope of the piece starting at (or containing, from the right) `t`.
    pub fn right_slope(&self, t: &Rat) -> Rat {
        self.pieces.iter().find(|p| *t < p.t1).unwrap_or_else(|| self.pieces.last().unwrap()).slope.clone()
    }

    /// Slope of the piece ending at (or containing, from the left) `t`.
    pub fn left_slope(&self, t: &Rat) -> Rat {
        self.pieces.iter().rev().find(|p| *t > p.t0).unwrap_or(&self.pieces[0]).slope.clone()
    }

    /// Pointwise difference of two functions on the same interval.
    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.start(), o.start());
        assert_eq!(self.end(), o.end());
        let mut cuts: Vec<Rat> = self.pieces.iter().map(|p| p.t0.clone()).chain(o.pieces.iter().map(|p| p.t0.clone())).collect();
        cuts.push(self.end().clone());
        cuts.sort();
        cuts.dedup();
        let pieces = cuts
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / Rat::from_integer(2.into());
                Piece {
                    t0: w[0].clone(),
                    t1: w[1].clone(),
                    v0: self.eval(&w[0]) - o.eval(&w[0]),
                    slope: self.right_slope(&mid) - o.right_slope(&mid),
                }
            })
            .collect();
        Self::from_pieces(pieces)
    }

    /// True if all slopes are integers.
    pub fn has_integral_slopes(&self) -> bool {
        self.pieces.iter().all(|p| p.slope.is_integer())
    }

    /// True if all slopes are `<= 0`.
    pub fn is_nonincreasing(&self) -> bool {
        self.pieces.iter().all(|p| p.slope <= Rat::zero())
    }

    pub fn to_json(&self) -> Value {
        json!(self
            .pieces
            .iter()
            .map(|p| json!({"t0": fmt_rat(&p.t0), "t1": fmt_rat(&p.t1), "v0": fmt_rat(&p.v0), "slope": fmt_rat(&p.slope)}))
            .collect::<Vec<_>>())
    }
}

impl fmt::Display for Piecewise1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("[{}, {}]: slope {}", fmt_rat(&p.t0), fmt_rat(&p.t1), fmt_rat(&p.slope)))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, ratq};

    #[test]
    fn envelope_of_three_lines() {
        // max{-t, 0, t - 2} on [-1, 3]
        let lines = vec![(rat(0), rat(-1)), (rat(0), rat(0)), (rat(-2), rat(1))];
        let e = Piecewise1D::upper_envelope(&lines, &rat(-1), &rat(3));
        assert_eq!(e.breakpoints(), vec![rat(0), rat(2)]);
        assert_eq!(e.slopes(), vec![rat(-1), rat(0), rat(1)]);
        assert_eq!(e.eval(&rat(3)), rat(1));
        assert_eq!(e.eval(&ratq(-1, 2)), ratq(1, 2));
    }

    #[test]
    fn concurrent_lines() {
        // three lines through the same point: middle one never shows.
        let lines = vec![(rat(0), rat(-1)), (rat(0), rat(0)), (rat(0), rat(1))];
        let e = Piecewise1D::upper_envelope(&lines, &rat(-1), &rat(1));
        assert_eq!(e.slopes(), vec![rat(-1), rat(1)]);
    }
}
