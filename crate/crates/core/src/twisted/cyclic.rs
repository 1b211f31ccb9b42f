//! Cyclic vectors by a deterministic-then-randomized candidate ladder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RationalFunction, TwistedPoly};
use crate::diffmod::{DiffModule, PMatrix};
use crate::error::{Error, Result};
use crate::linalg::bareiss_det;
use crate::series::{rat, PuiseuxPoly, Rat};

/// Number of candidates tried before giving up.
const MAX_CANDIDATES: usize = 96;

/// A cyclic vector `v` with its monic relation `P(D) v = 0`.
#[derive(Clone, Debug)]
pub struct CyclicVector {
    pub vector: Vec<PuiseuxPoly>,
    pub poly: TwistedPoly<RationalFunction>,
    /// `det[v, Dv, ..., D^(d-1) v]`, nonzero by construction.
    pub wronskian_det: PuiseuxPoly,
    /// Index of the accepted candidate in the ladder.
    pub tried: usize,
    /// `v, Dv, ..., D^(d-1) v` as coordinate vectors.
    pub iterates: Vec<Vec<PuiseuxPoly>>,
}

/// Action of the Euler derivation with weights `w` on coordinate vectors.
pub(crate) fn apply_derivation(nd: &PMatrix, w: &[Rat; 2], v: &[PuiseuxPoly]) -> Vec<PuiseuxPoly> {
    (0..v.len())
        .map(|i| {
            let mut acc = v[i].euler(w);
            for (j, vj) in v.iter().enumerate() {
                if !nd[i][j].is_zero() && !vj.is_zero() {
                    acc = &acc + &(&nd[i][j] * vj);
                }
            }
            acc
        })
        .collect()
}

struct Ladder {
    d: usize,
    arity: u8,
    rng: ChaCha8Rng,
    idx: usize,
}

impl Ladder {
    fn mono(&self, e0: i64, e1: i64) -> PuiseuxPoly {
        if self.arity == 1 {
            PuiseuxPoly::mono_int(1, e0 + e1, 0, rat(1))
        } else {
            PuiseuxPoly::mono_int(2, e0, e1, rat(1))
        }
    }

    fn next(&mut self) -> Option<Vec<PuiseuxPoly>> {
        let d = self.d;
        let k = self.idx;
        self.idx += 1;
        if k >= MAX_CANDIDATES {
            return None;
        }
        let unit = |i: usize| (0..d).map(|j| if i == j { PuiseuxPoly::one() } else { PuiseuxPoly::zero() }).collect();
        if k < d {
            return Some(unit(k));
        }
        let k = k - d;
        // all-ones, then monomial twists sum x^(i t) e_i, y^(i t) e_i, (xy)^(i t) e_i
        if k == 0 {
            return Some(vec![PuiseuxPoly::one(); d]);
        }
        let twists: [(i64, i64); 3] = [(1, 0), (0, 1), (1, 1)];
        let k = k - 1;
        if k < 9 {
            let (a, b) = twists[k % 3];
            let t = (k / 3 + 1) as i64;
            return Some((0..d as i64).map(|i| self.mono(a * i * t, b * i * t)).collect());
        }
        // random low-height combinations
        let v = (0..d)
            .map(|_| {
                let mut p = PuiseuxPoly::zero();
                let terms = self.rng.gen_range(1..=2);
                for _ in 0..terms {
                    let c: i64 = self.rng.gen_range(-3..=3);
                    let e0: i64 = self.rng.gen_range(0..=2);
                    let e1: i64 = if self.arity == 1 { 0 } else { self.rng.gen_range(0..=2) };
                    p = &p + &self.mono(e0, e1).scale(&rat(c));
                }
                p
            })
            .collect();
        Some(v)
    }
}

/// Cyclic vector for the Euler derivation with weights `w`.
pub fn cyclic_vector(m: &DiffModule, w: &[Rat; 2], seed: u64) -> Result<CyclicVector> {
    cyclic_vector_with(m, w, seed, 0)
}

/// As [`cyclic_vector`], but skips the first `skip` acceptable candidates
/// (used to confirm that derived invariants do not depend on the choice).
pub fn cyclic_vector_with(m: &DiffModule, w: &[Rat; 2], seed: u64, mut skip: usize) -> Result<CyclicVector> {
    let d = m.rank();
    let nd = m.euler_matrix(w);
    let arity = m.base().kind.arity();
    let mut ladder = Ladder { d, arity, rng: ChaCha8Rng::seed_from_u64(seed), idx: 0 };
    let mut tried = 0;
    while let Some(v) = ladder.next() {
        tried += 1;
        let mut cols = vec![v.clone()];
        for _ in 0..d {
            let next = apply_derivation(&nd, w, cols.last().unwrap());
            cols.push(next);
        }
        let wr: PMatrix = (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
        let det = bareiss_det(&wr);
        if det.is_zero() {
            continue;
        }
        if skip > 0 {
            skip -= 1;
            continue;
        }
        let mut lower = Vec::with_capacity(d);
        for i in 0..d {
            let mut wi = wr.clone();
            for (r, row) in wi.iter_mut().enumerate() {
                row[i] = cols[d][r].clone();
            }
            let ci = RationalFunction::new(bareiss_det(&wi), det.clone());
            lower.push(ci.neg());
        }
        let poly = TwistedPoly::monic(lower, w.clone());
        cols.truncate(d);
        return Ok(CyclicVector { vector: v, poly, wronskian_det: det, tried, iterates: cols });
    }
    Err(Error::CyclicVectorExhausted { tried })
}
