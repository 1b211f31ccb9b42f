//! Lattice growth `l(Delta^s(W), W)` under `Delta(L) = L + (w d/dw) L`.

use num_traits::Zero;

use super::{require_kz, uniformize};
use crate::diffmod::{DiffModule, PMatrix};
use crate::error::Result;
use crate::linalg::{self, Matrix};
use crate::series::{rat, Rat, RatFunc};

fn to_rf(m: &PMatrix) -> Matrix<RatFunc> {
    m.iter().map(|r| r.iter().map(|e| RatFunc::from_puiseux(e, 1)).collect()).collect()
}

/// `w d/dw` on a coordinate vector: `N c + w dc/dw`.
fn apply(n: &Matrix<RatFunc>, c: &[RatFunc]) -> Vec<RatFunc> {
    (0..c.len())
        .map(|i| {
            let mut acc = c[i].w_euler();
            for (j, cj) in c.iter().enumerate() {
                if !n[i][j].is_zero() && !cj.is_zero() {
                    acc = acc.add(&n[i][j].mul(cj));
                }
            }
            acc
        })
        .collect()
}

/// Reduces generators of a full-rank `Q[[w]]`-module to a triangular basis;
/// returns the basis vectors (as columns) with their pivot valuations.
fn reduce(mut gens: Vec<Vec<RatFunc>>, d: usize) -> (Vec<Vec<RatFunc>>, Vec<i64>) {
    let mut basis = Vec::new();
    let mut vals = Vec::new();
    for row in 0..d {
        let best = gens
            .iter()
            .enumerate()
            .filter_map(|(i, g)| g[row].valuation().map(|v| (v, i)))
            .min();
        let Some((v, pi)) = best else { continue };
        let piv = gens.swap_remove(pi);
        for g in gens.iter_mut() {
            if g[row].is_zero() {
                continue;
            }
            let f = g[row].div(&piv[row]);
            for (k, gk) in g.iter_mut().enumerate() {
                if !piv[k].is_zero() {
                    *gk = gk.sub(&f.mul(&piv[k]));
                }
            }
        }
        gens.retain(|g| g.iter().any(|x| !x.is_zero()));
        basis.push(piv);
        vals.push(v);
    }
    (basis, vals)
}

/// Values `l(Delta^s W, W)` for `s = 1..` and the detected limit of the
/// successive differences, normalized to the `z`-adic scale (divided by `h`).
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub lengths: Vec<i64>,
    pub limit: Option<Rat>,
}

/// `l(Delta^s(W), W)` where `W` is spanned by the columns of `basis`
/// (in `w`-coordinates of the uniformized module).
pub fn irreg_lattice_oracle(m: &DiffModule, basis: &PMatrix, s: usize) -> Result<i64> {
    Ok(grow(m, basis, s, false)?.lengths.last().copied().unwrap_or(0))
}

/// Runs the oracle up to `s_max` and reports the stabilized growth rate
/// (three equal consecutive differences).
pub fn irregularity_limit(m: &DiffModule, basis: &PMatrix, s_max: usize) -> Result<OracleRun> {
    grow(m, basis, s_max, true)
}

fn grow(m: &DiffModule, basis: &PMatrix, s_max: usize, stop_when_stable: bool) -> Result<OracleRun> {
    require_kz(m)?;
    let h = m.base().h;
    let mw = uniformize(m)?;
    let d = mw.rank();
    let n = to_rf(mw.matrix(0));
    let b = to_rf(basis);
    let det0 = linalg::det(&b).valuation().expect("lattice basis must be invertible");
    let mut cur: Vec<Vec<RatFunc>> = (0..d).map(|j| (0..d).map(|i| b[i][j].clone()).collect()).collect();
    let mut lengths = Vec::new();
    let mut limit = None;
    for _ in 0..s_max {
        let mut gens = cur.clone();
        gens.extend(cur.iter().map(|c| apply(&n, c)));
        let (basis, vals) = reduce(gens, d);
        cur = basis;
        lengths.push(det0 - vals.iter().sum::<i64>());
        let k = lengths.len();
        if k >= 4 {
            let d1 = lengths[k - 1] - lengths[k - 2];
            let d2 = lengths[k - 2] - lengths[k - 3];
            let d3 = lengths[k - 3] - lengths[k - 4];
            if d1 == d2 && d2 == d3 && limit.is_none() {
                limit = Some(rat(d1) / rat(h as i64));
                if stop_when_stable {
                    break;
                }
            }
        }
    }
    if limit.is_none() && lengths.len() >= 3 {
        let k = lengths.len();
        let d1 = lengths[k - 1] - lengths[k - 2];
        if d1 == lengths[k - 2] - lengths[k - 3] && d1.is_zero() {
            limit = Some(Rat::zero());
        }
    }
    Ok(OracleRun { lengths, limit })
}
