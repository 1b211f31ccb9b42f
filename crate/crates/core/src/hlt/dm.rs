//! Deligne–Malgrange lattices for the fractional-part section.

use super::{hlt_decompose, is_regular, require_kz, HltOptions, Lattice};
use crate::diffmod::{DiffModule, PMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::series::{PuiseuxPoly, Rat, RatFunc};

/// DM lattice of `M`: the basis spans the canonical lattice of `M`, and the
/// connection is that of `E(-phi) (x) M` on each block (`phi = 0` for
/// regular blocks), whose residue eigenvalues lie in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct DmLattice {
    pub lattice: Lattice,
    /// Block index sets with the polar part removed on that block.
    pub twists: Vec<(Vec<usize>, PuiseuxPoly)>,
    pub exponents: Vec<Rat>,
}

/// Computes the DM lattice in the regular and twist-regular cases (per block).
pub fn dm_lattice(m: &DiffModule, opts: &HltOptions) -> Result<DmLattice> {
    require_kz(m)?;
    let d = m.rank();
    let mut basis: PMatrix = vec![vec![PuiseuxPoly::zero(); d]; d];
    let mut conn: PMatrix = vec![vec![PuiseuxPoly::zero(); d]; d];
    let mut prec: Option<i64> = None;
    let mut twists = Vec::new();
    for (idx, block) in m.blocks() {
        let reg = is_regular(&block, opts)?;
        let (lat, phi) = if reg.regular {
            (reg.lattice.expect("regular blocks carry a lattice"), PuiseuxPoly::zero().with_arity(1))
        } else {
            let parts = hlt_decompose(&block, opts)?;
            if parts.len() != 1 || parts[0].h != m.base().h {
                return Err(Error::UnsupportedGeneralCase(
                    "DM lattices beyond the twist-regular unramified case need Galois descent".into(),
                ));
            }
            let phi = parts[0].phi.clone();
            let twisted = block.twist(&-&phi);
            let r = is_regular(&twisted, opts)?;
            if !r.regular {
                return Err(Error::Precondition("twist by the recovered polar part is not regular".into()));
            }
            (r.lattice.unwrap(), phi)
        };
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                basis[i][j] = lat.basis[a][b].clone();
                conn[i][j] = lat.connection[a][b].clone();
            }
        }
        prec = match (prec, lat.precision) {
            (None, p) | (p, None) => p,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        twists.push((idx, phi));
    }
    let lattice = Lattice { basis, connection: conn, precision: prec };
    let exponents = lattice.eigenvalues()?;
    Ok(DmLattice { lattice, twists, exponents })
}

/// True when the columns of `b1` and `b2` span the same `Q[[w]]`-lattice.
pub fn same_lattice(b1: &PMatrix, b2: &PMatrix) -> bool {
    let to_rf = |m: &PMatrix| -> Matrix<RatFunc> { m.iter().map(|r| r.iter().map(|e| RatFunc::from_puiseux(e, 1)).collect()).collect() };
    let (a, b) = (to_rf(b1), to_rf(b2));
    let Some(ainv) = linalg::inverse(&a) else { return false };
    let t = linalg::mat_mul(&ainv, &b);
    let integral = t.iter().flatten().all(|e| e.valuation().is_none_or(|v| v >= 0));
    integral && linalg::det(&t).valuation() == Some(0)
}
