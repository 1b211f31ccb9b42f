//! Lattices over `Q[[w]]`, residues, shearing, and regulating lattices.

use num_traits::{One, Zero};

use super::{require_kz, uniformize, HltOptions};
use crate::diffmod::{pmat_identity, pmat_mul, DiffModule, PMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::series::{rat, PuiseuxPoly, Rat, TruncatedSeries};
use crate::twisted::{cyclic_vector, newton_polygon, DiffCoeff};

pub(crate) fn trunc(p: &PuiseuxPoly, n: Option<i64>) -> PuiseuxPoly {
    match n {
        Some(n) => TruncatedSeries::new(p.clone(), rat(n)).into_body(),
        None => p.clone(),
    }
}

fn w_pow(k: i64) -> PuiseuxPoly {
    PuiseuxPoly::mono_int(1, k, 0, Rat::one())
}

fn const_pmat(m: &Matrix<Rat>) -> PMatrix {
    m.iter().map(|r| r.iter().map(|c| PuiseuxPoly::constant(c.clone()).with_arity(1)).collect()).collect()
}

/// A `Q[[w]]`-lattice of a module over `Q((w))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    /// Columns are the lattice basis in module coordinates (Laurent polynomials).
    pub basis: PMatrix,
    /// Matrix of `w d/dw` in that basis; entries are known modulo `w^precision`.
    pub connection: PMatrix,
    /// `None` when the connection matrix is exact.
    pub precision: Option<i64>,
}

impl Lattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// True when the lattice is stable: no negative powers in the connection.
    pub fn is_stable(&self) -> bool {
        self.connection.iter().flatten().all(|e| e.min_exp(0).is_none_or(|v| v >= Rat::zero()))
    }

    /// Constant term of the connection matrix.
    pub fn residue(&self) -> Result<Matrix<Rat>> {
        if !self.is_stable() {
            return Err(Error::Precondition("lattice is not stable under w d/dw".into()));
        }
        if self.precision.is_some_and(|p| p < 1) {
            return Err(Error::PrecisionExhausted("residue no longer determined".into()));
        }
        Ok(self.connection.iter().map(|r| r.iter().map(|e| e.constant_term()).collect()).collect())
    }

    /// Residue eigenvalues with multiplicity, sorted.
    pub fn eigenvalues(&self) -> Result<Vec<Rat>> {
        eigenvalues(&self.residue()?)
    }

    /// All eigenvalues in `[0, 1)`.
    pub fn is_tau_normalized(&self) -> Result<bool> {
        Ok(self.eigenvalues()?.iter().all(|l| *l >= Rat::zero() && *l < Rat::one()))
    }
}

/// Eigenvalues (with multiplicity) of a rational matrix, if all rational.
pub fn eigenvalues(a: &Matrix<Rat>) -> Result<Vec<Rat>> {
    if a.is_empty() {
        return Ok(vec![]);
    }
    let roots = linalg::charpoly(a).split_over_q("residue eigenvalues")?;
    let mut out = Vec::new();
    for (r, k) in roots {
        out.extend(std::iter::repeat(r).take(k));
    }
    out.sort();
    Ok(out)
}

/// The standard lattice `Q[[w]]^d` with the module's own matrix.
pub fn standard_lattice(mw: &DiffModule) -> Lattice {
    Lattice { basis: pmat_identity(mw.rank()), connection: mw.matrix(0).clone(), precision: None }
}

/// Lattice spanned by `v, Dv, ..., D^(d-1) v` for a cyclic vector `v`, if it is
/// stable (Fuchs' condition on the cyclic relation); `None` otherwise.
pub fn companion_lattice(mw: &DiffModule, opts: &HltOptions) -> Result<Option<Lattice>> {
    let d = mw.rank();
    let w = [rat(1), rat(0)];
    let cv = cyclic_vector(mw, &w, opts.seed)?;
    let n = opts.precision + 8;
    let mut conn: PMatrix = vec![vec![PuiseuxPoly::zero(); d]; d];
    for i in 0..d {
        if i + 1 < d {
            conn[i + 1][i] = PuiseuxPoly::one();
        }
        let c = cv.poly.coeff(i).c_neg();
        if c.is_zero() {
            continue;
        }
        let vn = c.num().min_exp(0).unwrap();
        let vd = c.den().min_exp(0).unwrap();
        if vn < vd {
            return Ok(None);
        }
        let inv = TruncatedSeries::exact(c.den().clone()).inverse(&rat(n))?;
        let s = &inv * &TruncatedSeries::exact(c.num().clone());
        conn[i][d - 1] = trunc(s.body(), Some(n));
    }
    let basis: PMatrix = (0..d).map(|r| (0..d).map(|j| cv.iterates[j][r].clone()).collect()).collect();
    Ok(Some(Lattice { basis, connection: conn, precision: Some(n) }))
}

/// Splits `Q^d = ker f(A0) (+) im f(A0)` with `f = prod_{l in S} (A0 - l)^d`
/// and returns the change of basis `[X | Y]` and `dim X`.
fn split_for(a0: &Matrix<Rat>, s: &[Rat]) -> (Matrix<Rat>, usize) {
    let d = a0.len();
    let mut f: Matrix<Rat> = linalg::identity(d);
    for l in s {
        let shifted = linalg::mat_sub(a0, &linalg::mat_scale(&linalg::identity(d), l));
        for _ in 0..d {
            f = linalg::mat_mul(&f, &shifted);
        }
    }
    let xs = linalg::nullspace(&f);
    let mut ft = linalg::transpose(&f);
    let piv = linalg::rref(&mut ft);
    let ys: Vec<Vec<Rat>> = ft.into_iter().take(piv.len()).collect();
    let kx = xs.len();
    let cols: Vec<Vec<Rat>> = xs.into_iter().chain(ys).collect();
    (linalg::transpose(&cols), kx)
}

fn conjugate_const(l: &Lattice, p: &Matrix<Rat>) -> Lattice {
    let pinv = linalg::inverse(p).expect("invertible change of basis");
    let a = pmat_mul(&pmat_mul(&const_pmat(&pinv), &l.connection), &const_pmat(p));
    let b = pmat_mul(&l.basis, &const_pmat(p));
    Lattice { basis: b, connection: a.iter().map(|r| r.iter().map(|e| trunc(e, l.precision)).collect()).collect(), precision: l.precision }
}

fn shear_impl(l: &Lattice, s: &[Rat], up: bool) -> Result<Lattice> {
    if s.is_empty() {
        return Ok(l.clone());
    }
    let a0 = l.residue()?;
    for x in s {
        if eigenvalues(&a0)?.iter().all(|e| e != x) {
            return Err(Error::Precondition(format!("{x} is not a residue eigenvalue")));
        }
    }
    let (p, kx) = split_for(&a0, s);
    let c = conjugate_const(l, &p);
    let d = l.rank();
    let sign: i64 = if up { 1 } else { -1 };
    let prec = l.precision.map(|p| p - 1);
    let mut conn = c.connection.clone();
    for i in 0..d {
        for j in 0..d {
            let e = &c.connection[i][j];
            conn[i][j] = match (i < kx, j < kx) {
                (true, true) if i == j => e + &PuiseuxPoly::constant(rat(sign)),
                (true, true) | (false, false) => e.clone(),
                (true, false) => e * &w_pow(-sign),
                (false, true) => e * &w_pow(sign),
            };
            conn[i][j] = trunc(&conn[i][j], prec);
        }
    }
    let mut basis = c.basis.clone();
    for row in basis.iter_mut() {
        for e in row.iter_mut().take(kx) {
            *e = &*e * &w_pow(sign);
        }
    }
    let out = Lattice { basis, connection: conn, precision: prec };
    if !out.is_stable() {
        return Err(Error::Precondition("shearing produced an unstable lattice".into()));
    }
    Ok(out)
}

/// Shearing that replaces each residue eigenvalue in `s` by itself plus one.
pub fn shear(l: &Lattice, s: &[Rat]) -> Result<Lattice> {
    shear_impl(l, s, true)
}

/// Shearing that replaces each residue eigenvalue in `s` by itself minus one.
pub fn shear_down(l: &Lattice, s: &[Rat]) -> Result<Lattice> {
    shear_impl(l, s, false)
}

/// Shears until every residue eigenvalue lies in `[0, 1)` (hence prepared).
pub fn prepare(l: &Lattice) -> Result<Lattice> {
    let mut cur = l.clone();
    let ev = cur.eigenvalues()?;
    let spread: i64 = ev.iter().map(|e| crate::series::rat::floor(e).magnitude().try_into().unwrap_or(i64::MAX / 4)).max().unwrap_or(0);
    let budget = 2 * (spread + 2) * (l.rank() as i64 + 1);
    for _ in 0..budget {
        let ev = cur.eigenvalues()?;
        let mut low: Vec<Rat> = ev.iter().filter(|e| **e < Rat::zero()).cloned().collect();
        low.sort();
        low.dedup();
        if !low.is_empty() {
            cur = shear(&cur, &low)?;
            continue;
        }
        let mut high: Vec<Rat> = ev.iter().filter(|e| **e >= Rat::one()).cloned().collect();
        high.sort();
        high.dedup();
        if !high.is_empty() {
            cur = shear_down(&cur, &high)?;
            continue;
        }
        return Ok(cur);
    }
    Err(Error::BudgetExhausted("shearing did not reach [0, 1)".into()))
}

/// Outcome of the regularity test.
#[derive(Clone, Debug)]
pub struct Regularity {
    pub regular: bool,
    /// Prepared regulating lattice (eigenvalues in `[0, 1)`) in `w`-coordinates.
    pub lattice: Option<Lattice>,
    /// Residue eigenvalues of that lattice.
    pub exponents: Vec<Rat>,
    /// Ramification index of the base (`w = z^(1/h)`).
    pub h: u32,
}

/// Regularity via construction of a regulating lattice: the standard lattice
/// when it is stable, otherwise the lattice of a cyclic vector when its
/// relation satisfies Fuchs' condition.  Blocks are treated separately.
pub fn is_regular(m: &DiffModule, opts: &HltOptions) -> Result<Regularity> {
    require_kz(m)?;
    let mw = uniformize(m)?;
    let d = mw.rank();
    let mut basis: PMatrix = vec![vec![PuiseuxPoly::zero(); d]; d];
    let mut conn: PMatrix = vec![vec![PuiseuxPoly::zero(); d]; d];
    let mut prec: Option<i64> = None;
    for (idx, block) in mw.blocks() {
        let std = standard_lattice(&block);
        let lat = if std.is_stable() {
            std
        } else {
            match companion_lattice(&block, opts)? {
                Some(l) => l,
                None => return Ok(Regularity { regular: false, lattice: None, exponents: vec![], h: m.base().h }),
            }
        };
        let lat = prepare(&lat)?;
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
    }
    let lattice = Lattice { basis, connection: conn, precision: prec };
    let exponents = lattice.eigenvalues()?;
    Ok(Regularity { regular: true, lattice: Some(lattice), exponents, h: m.base().h })
}

/// Regularity via the Newton polygon of a cyclic vector: all slopes capped.
pub fn polygon_regular(m: &DiffModule, seed: u64) -> Result<bool> {
    require_kz(m)?;
    for (_, block) in m.blocks() {
        let cv = cyclic_vector(&block, &[rat(1), rat(0)], seed)?;
        let np = newton_polygon(&cv.poly, &[rat(1)]);
        if np.log_scales().iter().any(|s| *s > Rat::zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}
