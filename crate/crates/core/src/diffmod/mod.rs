//! Finite differential modules given by connection matrices.
//!
//! Column convention: the derivation `D_i` acts on the fixed basis by
//! `D_i(e_j) = sum_k N_i[k][j] e_k`, so on coordinate vectors
//! `D_i(c) = D_i(c) + N_i c`.  Over `R21`/`R22` the canonical derivations are
//! `d/dx` and `d/dy`; over `Q((z))` the single stored derivation is `z d/dz`.

mod json;

pub use json::{module_from_json, module_to_json};

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::series::{rat, PuiseuxPoly, Rat};

/// Base ring descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseKind {
    /// `k[[x, y]][1/x]`
    R21,
    /// `k[[x, y]][1/x, 1/y]`
    R22,
    /// `k((z))` with derivation `z d/dz`
    Kz,
}

impl BaseKind {
    pub fn arity(self) -> u8 {
        match self {
            BaseKind::Kz => 1,
            _ => 2,
        }
    }

    pub fn poles(self) -> [bool; 2] {
        match self {
            BaseKind::R21 => [true, false],
            BaseKind::R22 => [true, true],
            BaseKind::Kz => [true, false],
        }
    }

    pub fn var_names(self) -> &'static [&'static str] {
        match self {
            BaseKind::Kz => &["z"],
            _ => &["x", "y"],
        }
    }

    pub fn num_derivations(self) -> usize {
        self.arity() as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseKind::R21 => "R21",
            BaseKind::R22 => "R22",
            BaseKind::Kz => "Kz",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "R21" => Ok(BaseKind::R21),
            "R22" => Ok(BaseKind::R22),
            "Kz" => Ok(BaseKind::Kz),
            other => Err(Error::Input(format!("unknown base ring `{other}` (expected R21, R22 or Kz)"))),
        }
    }
}

/// Base ring with its ramification index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BaseRing {
    pub kind: BaseKind,
    pub h: u32,
}

impl BaseRing {
    pub fn new(kind: BaseKind, h: u32) -> Self {
        BaseRing { kind, h: h.max(1) }
    }
}

pub type PMatrix = Vec<Vec<PuiseuxPoly>>;

pub fn pmat_zero(n: usize) -> PMatrix {
    vec![vec![PuiseuxPoly::zero(); n]; n]
}

pub fn pmat_identity(n: usize) -> PMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { PuiseuxPoly::one() } else { PuiseuxPoly::zero() }).collect()).collect()
}

pub fn pmat_mul(a: &PMatrix, b: &PMatrix) -> PMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![PuiseuxPoly::zero(); m]; n];
    for i in 0..n {
        for (l, bl) in b.iter().enumerate() {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !bl[j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][l] * &bl[j]);
                }
            }
        }
    }
    out
}

pub fn pmat_add(a: &PMatrix, b: &PMatrix) -> PMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn pmat_sub(a: &PMatrix, b: &PMatrix) -> PMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

pub fn pmat_map(a: &PMatrix, f: impl Fn(&PuiseuxPoly) -> PuiseuxPoly) -> PMatrix {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

pub fn pmat_scale(a: &PMatrix, c: &PuiseuxPoly) -> PMatrix {
    pmat_map(a, |x| x * c)
}

pub fn pmat_is_zero(a: &PMatrix) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

pub fn pmat_transpose(a: &PMatrix) -> PMatrix {
    crate::linalg::transpose(a)
}

/// Kronecker product `a (x) b`.
pub fn pmat_kron(a: &PMatrix, b: &PMatrix) -> PMatrix {
    let (n, m) = (a.len(), b.len());
    let mut out = pmat_zero(n * m);
    for i in 0..n {
        for j in 0..n {
            if a[i][j].is_zero() {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

/// Rank-`d` module over a declared base, one matrix per canonical derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffModule {
    base: BaseRing,
    rank: usize,
    mats: Vec<PMatrix>,
    label: Option<String>,
}

impl DiffModule {
    /// Validates shapes, pole permissions and ramification indices.
    pub fn new(base: BaseRing, mats: Vec<PMatrix>, label: Option<String>) -> Result<Self> {
        let nd = base.kind.num_derivations();
        if mats.len() != nd {
            return Err(Error::Input(format!("{} needs {nd} connection matrices, got {}", base.kind.name(), mats.len())));
        }
        let rank = mats[0].len();
        if rank == 0 {
            return Err(Error::Input("rank must be at least 1".into()));
        }
        let mut h = base.h;
        for m in &mats {
            if m.len() != rank || m.iter().any(|r| r.len() != rank) {
                return Err(Error::Input("connection matrices must be square of equal size".into()));
            }
            for e in m.iter().flatten() {
                if e.arity() > base.kind.arity() {
                    return Err(Error::Input("matrix entry uses too many variables".into()));
                }
                if e.terms().any(|(ex, _)| ex[1] < Rat::zero()) && !base.kind.poles()[1] {
                    return Err(Error::ForbiddenPole(base.kind.var_names().get(1).unwrap_or(&"y").to_string()));
                }
                h = crate::series::rat::lcm_u32(h, e.minimal_h());
            }
        }
        if base.h % h != 0 {
            return Err(Error::Input(format!(
                "entries need ramification index {h}, but the module declares h = {}",
                base.h
            )));
        }
        let kind = base.kind;
        let mats = mats
            .into_iter()
            .map(|m| pmat_map(&m, |e| e.clone().with_arity(kind.arity()).with_poles(kind.poles())))
            .collect();
        Ok(DiffModule { base, rank, mats, label })
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrices(&self) -> &[PMatrix] {
        &self.mats
    }

    pub fn matrix(&self, i: usize) -> &PMatrix {
        &self.mats[i]
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    fn derivative(&self, f: &PuiseuxPoly, i: usize) -> PuiseuxPoly {
        match self.base.kind {
            BaseKind::Kz => f.euler(&[rat(1), rat(0)]),
            _ => f.deriv(i),
        }
    }

    /// `E(phi)`: rank one, `N_i = [D_i(phi)]`.
    pub fn e_phi(phi: &PuiseuxPoly, base: BaseRing) -> Result<Self> {
        let nd = base.kind.num_derivations();
        let h = crate::series::rat::lcm_u32(base.h, phi.h());
        let base = BaseRing::new(base.kind, h);
        let phi = phi.clone().with_poles(base.kind.poles());
        phi.check_poles(base.kind.var_names())?;
        let mats = (0..nd)
            .map(|i| {
                let d = match base.kind {
                    BaseKind::Kz => phi.euler(&[rat(1), rat(0)]),
                    _ => phi.deriv(i),
                };
                vec![vec![d]]
            })
            .collect();
        Ok(DiffModule { base, rank: 1, mats, label: Some(format!("E({})", phi.to_string_with(base.kind.var_names()))) })
    }

    /// Trivial module of rank `d`.
    pub fn trivial(base: BaseRing, d: usize) -> Self {
        DiffModule { base, rank: d, mats: vec![pmat_zero(d); base.kind.num_derivations()], label: Some(format!("O^{d}")) }
    }

    fn merged_base(&self, o: &Self) -> Result<BaseRing> {
        if self.base.kind != o.base.kind {
            return Err(Error::BaseMismatch);
        }
        Ok(BaseRing::new(self.base.kind, crate::series::rat::lcm_u32(self.base.h, o.base.h)))
    }

    pub fn tensor(&self, o: &Self) -> Result<Self> {
        let base = self.merged_base(o)?;
        let ia = pmat_identity(self.rank);
        let ib = pmat_identity(o.rank);
        let mats = self
            .mats
            .iter()
            .zip(&o.mats)
            .map(|(a, b)| pmat_add(&pmat_kron(a, &ib), &pmat_kron(&ia, b)))
            .collect();
        Ok(DiffModule { base, rank: self.rank * o.rank, mats, label: Some(format!("{} (x) {}", self.name(), o.name())) })
    }

    pub fn dual(&self) -> Self {
        let mats = self.mats.iter().map(|m| pmat_map(&pmat_transpose(m), |e| -e)).collect();
        DiffModule { base: self.base, rank: self.rank, mats, label: Some(format!("dual({})", self.name())) }
    }

    pub fn end(&self) -> Self {
        let mut e = self.dual().tensor(self).expect("same base");
        e.label = Some(format!("End({})", self.name()));
        e
    }

    pub fn direct_sum(&self, o: &Self) -> Result<Self> {
        let base = self.merged_base(o)?;
        let n = self.rank + o.rank;
        let mats = self
            .mats
            .iter()
            .zip(&o.mats)
            .map(|(a, b)| {
                let mut m = pmat_zero(n);
                for i in 0..self.rank {
                    for j in 0..self.rank {
                        m[i][j] = a[i][j].clone();
                    }
                }
                for i in 0..o.rank {
                    for j in 0..o.rank {
                        m[self.rank + i][self.rank + j] = b[i][j].clone();
                    }
                }
                m
            })
            .collect();
        Ok(DiffModule { base, rank: n, mats, label: Some(format!("{} (+) {}", self.name(), o.name())) })
    }

    /// Direct sum of a nonempty list.
    pub fn direct_sum_all(parts: &[DiffModule]) -> Result<Self> {
        let mut acc = parts.first().ok_or_else(|| Error::Input("empty direct sum".into()))?.clone();
        for p in &parts[1..] {
            acc = acc.direct_sum(p)?;
        }
        Ok(acc)
    }

    /// `E(phi) (x) M`, computed in place: `N_i + D_i(phi) I`.
    pub fn twist(&self, phi: &PuiseuxPoly) -> Self {
        let mats = self
            .mats
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let d = self.derivative(phi, i);
                let mut m = m.clone();
                for (k, row) in m.iter_mut().enumerate() {
                    row[k] = &row[k] + &d;
                }
                m
            })
            .collect();
        let h = crate::series::rat::lcm_u32(self.base.h, phi.h());
        DiffModule { base: BaseRing::new(self.base.kind, h), rank: self.rank, mats, label: self.label.clone() }
    }

    /// Change of basis by `G` (columns = new basis): `N_i' = G^-1 N_i G + G^-1 D_i(G)`.
    ///
    /// `g_inv` must be the inverse of `g` over the base ring.
    pub fn gauge(&self, g: &PMatrix, g_inv: &PMatrix) -> Result<Self> {
        let d = self.rank;
        let shape_ok = |m: &PMatrix| m.len() == d && m.iter().all(|r| r.len() == d);
        if !shape_ok(g) || !shape_ok(g_inv) {
            return Err(Error::Input(format!("gauge matrices must be {d} x {d}")));
        }
        if !pmat_is_zero(&pmat_sub(&pmat_mul(g, g_inv), &pmat_identity(d))) {
            return Err(Error::Input("gauge matrix and inverse do not multiply to the identity".into()));
        }
        let mats: Vec<PMatrix> = self
            .mats
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let dg = pmat_map(g, |e| self.derivative(e, i));
                pmat_add(&pmat_mul(&pmat_mul(g_inv, n), g), &pmat_mul(g_inv, &dg))
            })
            .collect();
        DiffModule::new(self.base, mats, self.label.clone())
    }

    /// Commutator identity `d1(N2) - d2(N1) + N1 N2 - N2 N1 = 0`.
    pub fn check_flat(&self) -> bool {
        if self.mats.len() < 2 {
            return true;
        }
        let (n1, n2) = (&self.mats[0], &self.mats[1]);
        let d1n2 = pmat_map(n2, |e| e.deriv(0));
        let d2n1 = pmat_map(n1, |e| e.deriv(1));
        let lhs = pmat_add(&pmat_sub(&d1n2, &d2n1), &pmat_sub(&pmat_mul(n1, n2), &pmat_mul(n2, n1)));
        pmat_is_zero(&lhs)
    }

    /// Same module viewed over the ring with ramification `lcm(h, h2)`.
    pub fn pullback_ramified(&self, h2: u32) -> Self {
        let h = crate::series::rat::lcm_u32(self.base.h, h2);
        let mats = self.mats.iter().map(|m| pmat_map(m, |e| e.ramify(h2))).collect();
        DiffModule { base: BaseRing::new(self.base.kind, h), rank: self.rank, mats, label: self.label.clone() }
    }

    /// Substitutes `x_var = t^k` and rewrites in the coordinate `t`.
    ///
    /// The derivation in that coordinate picks up the chain-rule factor
    /// `k t^(k-1)` (or `k` for the Euler derivation over `Q((z))`).
    pub fn ramified_coordinate(&self, var: usize, k: i64) -> Self {
        assert!(k >= 1);
        let sub = |e: &PuiseuxPoly| e.power_substitute(var, k);
        let mats = self
            .mats
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let m2 = pmat_map(m, sub);
                if i != var {
                    return m2;
                }
                let factor = match self.base.kind {
                    BaseKind::Kz => PuiseuxPoly::constant(rat(k)),
                    _ => {
                        let mut e = [Rat::zero(), Rat::zero()];
                        e[var] = rat(k - 1);
                        PuiseuxPoly::monomial(2, e, rat(k))
                    }
                };
                pmat_scale(&m2, &factor)
            })
            .collect();
        DiffModule { base: self.base, rank: self.rank, mats, label: self.label.clone() }
    }

    /// Recentering `y -> z(x) + u` for a module over `R21`; the result is
    /// written in coordinates `(x, u)` with `d/dx|_u = d/dx + z'(x) d/dy`.
    pub fn pullback_center(&self, z: &PuiseuxPoly) -> Result<Self> {
        if self.base.kind != BaseKind::R21 {
            return Err(Error::Input("recentering is defined for modules over R21".into()));
        }
        let z = z.clone().with_arity(2);
        let sub = |e: &PuiseuxPoly| e.substitute_center(&z);
        let nx = self.mats[0].iter().map(|r| r.iter().map(sub).collect::<Result<Vec<_>>>()).collect::<Result<PMatrix>>()?;
        let ny = self.mats[1].iter().map(|r| r.iter().map(sub).collect::<Result<Vec<_>>>()).collect::<Result<PMatrix>>()?;
        let dz = z.deriv(0);
        let nx2 = pmat_add(&nx, &pmat_scale(&ny, &dz));
        let h = crate::series::rat::lcm_u32(self.base.h, z.h());
        Ok(DiffModule { base: BaseRing::new(BaseKind::R21, h), rank: self.rank, mats: vec![nx2, ny], label: self.label.clone() })
    }

    /// Chart `y = x v` of the blowup of the origin, in coordinates `(x, v)`.
    pub fn blowup_chart_a(&self) -> Result<Self> {
        self.require_two_vars()?;
        let m = [[1, 1], [0, 1]];
        let nx = pmat_map(&self.mats[0], |e| e.monomial_map(m));
        let ny = pmat_map(&self.mats[1], |e| e.monomial_map(m));
        let v = PuiseuxPoly::var(2, 1);
        let x = PuiseuxPoly::var(2, 0);
        let na = pmat_add(&nx, &pmat_scale(&ny, &v));
        let nv = pmat_scale(&ny, &x);
        let label = format!("{} [chart y = x*v]", self.name());
        let mats = [na, nv].iter().map(|m| pmat_map(m, |e| e.clone().with_poles(BaseKind::R21.poles()))).collect();
        Ok(DiffModule { base: BaseRing::new(BaseKind::R21, self.base.h), rank: self.rank, mats, label: Some(label) })
    }

    /// Chart `x = u y` of the blowup of the origin, in coordinates `(u, y)`.
    pub fn blowup_chart_b(&self) -> Result<Self> {
        self.require_two_vars()?;
        let m = [[1, 0], [1, 1]];
        let nx = pmat_map(&self.mats[0], |e| e.monomial_map(m));
        let ny = pmat_map(&self.mats[1], |e| e.monomial_map(m));
        let u = PuiseuxPoly::var(2, 0);
        let y = PuiseuxPoly::var(2, 1);
        let nu = pmat_scale(&nx, &y);
        let nyb = pmat_add(&pmat_scale(&nx, &u), &ny);
        let label = format!("{} [chart x = u*y]", self.name());
        let mats = [nu, nyb].iter().map(|m| pmat_map(m, |e| e.clone().with_poles(BaseKind::R22.poles()))).collect();
        Ok(DiffModule { base: BaseRing::new(BaseKind::R22, self.base.h), rank: self.rank, mats, label: Some(label) })
    }

    fn require_two_vars(&self) -> Result<()> {
        if self.base.kind == BaseKind::Kz {
            Err(Error::Input("blowups need a two-variable base".into()))
        } else {
            Ok(())
        }
    }

    /// Matrix of the Euler derivation `w0 x d/dx + w1 y d/dy` (or `w0 z d/dz`).
    pub fn euler_matrix(&self, w: &[Rat; 2]) -> PMatrix {
        match self.base.kind {
            BaseKind::Kz => pmat_map(&self.mats[0], |e| e.scale(&w[0])),
            _ => {
                let x = PuiseuxPoly::var(2, 0).scale(&w[0]);
                let y = PuiseuxPoly::var(2, 1).scale(&w[1]);
                pmat_add(&pmat_scale(&self.mats[0], &x), &pmat_scale(&self.mats[1], &y))
            }
        }
    }

    /// Splits along the connected components of the nonzero pattern of all
    /// connection matrices (each component spans a direct summand).
    pub fn blocks(&self) -> Vec<(Vec<usize>, DiffModule)> {
        let n = self.rank;
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut Vec<usize>, i: usize) -> usize {
            let mut r = i;
            while c[r] != r {
                r = c[r];
            }
            let mut j = i;
            while c[j] != r {
                let nx = c[j];
                c[j] = r;
                j = nx;
            }
            r
        }
        for m in &self.mats {
            for (i, row) in m.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    if !e.is_zero() {
                        let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                        if a != b {
                            comp[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut rep_of: Vec<Option<usize>> = vec![None; n];
        for i in 0..n {
            let r = find(&mut comp, i);
            match rep_of[r] {
                Some(g) => groups[g].push(i),
                None => {
                    rep_of[r] = Some(groups.len());
                    groups.push(vec![i]);
                }
            }
        }
        groups
            .into_iter()
            .map(|idx| {
                let mats = self
                    .mats
                    .iter()
                    .map(|m| idx.iter().map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect()).collect())
                    .collect();
                let sub = DiffModule { base: self.base, rank: idx.len(), mats, label: None };
                (idx, sub)
            })
            .collect()
    }

    pub fn name(&self) -> String {
        self.label.clone().unwrap_or_else(|| format!("M(rank {})", self.rank))
    }

    /// Substitutes the same Puiseux map into every entry (used by tests).
    pub fn map_entries(&self, f: impl Fn(&PuiseuxPoly) -> PuiseuxPoly) -> Self {
        let mats = self.mats.iter().map(|m| pmat_map(m, &f)).collect();
        DiffModule { base: self.base, rank: self.rank, mats, label: self.label.clone() }
    }
}

impl fmt::Display for DiffModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} over {} (h = {}), rank {}", self.name(), self.base.kind.name(), self.base.h, self.rank)?;
        let names = self.base.kind.var_names();
        for (i, m) in self.mats.iter().enumerate() {
            writeln!(f, "  N{}:", i + 1)?;
            for row in m {
                let cells: Vec<String> = row.iter().map(|e| e.to_string_with(names)).collect();
                writeln!(f, "    [{}]", cells.join(", "))?;
            }
        }
        Ok(())
    }
}
