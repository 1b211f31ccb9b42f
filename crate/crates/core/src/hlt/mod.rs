//! One-variable theory over `Q((z))` with derivation `z d/dz`.
//!
//! Everything here works in the uniformizing coordinate `w = z^(1/h)` of the
//! module's base (with derivation `w d/dw = h z d/dz`), so lattices live over
//! `Q[[w]]` and residues, exponents and lengths are integral notions.

mod decompose;
mod dm;
mod lattice;
mod oracle;
mod solve;

pub use decompose::{hlt_decompose, HltSummand};
pub use dm::{dm_lattice, same_lattice};
pub use lattice::{
    companion_lattice, eigenvalues, is_regular, polygon_regular, prepare, shear, shear_down, standard_lattice, Lattice,
    Regularity,
};
pub use oracle::{irreg_lattice_oracle, irregularity_limit, OracleRun};
pub use solve::{fundamental_solution, solution_residual};

use crate::diffmod::{BaseKind, BaseRing, DiffModule};
use crate::error::{Error, Result};
use crate::series::{rat, PuiseuxPoly, Rat};

/// Options shared by the one-variable algorithms.
#[derive(Clone, Debug)]
pub struct HltOptions {
    /// Target `w`-adic precision of series results.
    pub precision: i64,
    /// Largest ramification index the decomposition may introduce.
    pub h_max: u32,
    /// Seed of the randomized cyclic-vector ladder.
    pub seed: u64,
}

impl Default for HltOptions {
    fn default() -> Self {
        HltOptions { precision: 16, h_max: 12, seed: 0 }
    }
}

pub(crate) fn require_kz(m: &DiffModule) -> Result<()> {
    if m.base().kind != BaseKind::Kz {
        return Err(Error::Input(format!("expected a module over Kz, got {}", m.base().kind.name())));
    }
    Ok(())
}

/// Rewrites a module over `Q((z^(1/h)))` in the coordinate `w = z^(1/h)`,
/// returning a module over `Q((w))` (h = 1) with derivation `w d/dw`.
pub fn uniformize(m: &DiffModule) -> Result<DiffModule> {
    require_kz(m)?;
    let h = m.base().h;
    if h == 1 {
        return Ok(m.clone());
    }
    let k = rat(h as i64);
    // z^(m/h) = w^m, and z d/dz = (1/h) w d/dw
    let mats = vec![crate::diffmod::pmat_map(m.matrix(0), |e| {
        let terms: Vec<_> = e
            .terms()
            .map(|(ex, c)| {
                let we = &ex[0] * &k;
                assert!(we.is_integer(), "entry not defined over the declared ramification");
                ([crate::series::rat::to_i64(&we).expect("exponent fits"), 0], c * &k)
            })
            .collect();
        PuiseuxPoly::from_raw(1, 1, [true, false], terms)
    })];
    DiffModule::new(BaseRing::new(BaseKind::Kz, 1), mats, m.label().map(|s| format!("{s} [w = z^(1/{h})]")))
}

/// The fractional-part section `tau(lambda) in [0, 1)`.
pub fn tau(lambda: &Rat) -> Rat {
    crate::series::rat::frac(lambda)
}

/// Checks `tau(l) - l = ceil((tau(a l) - a l) / a)` for the fractional-part section.
pub fn tau_check(lambda: &Rat, a: i64) -> bool {
    assert!(a >= 1);
    let ar = rat(a);
    let lhs = tau(lambda) - lambda;
    let al = lambda * &ar;
    let rhs = Rat::from_integer(crate::series::rat::ceil(&((tau(&al) - &al) / ar)));
    lhs == rhs
}

/// Exponents (mod Z, as representatives in `[0, 1)`) of a regular module.
pub fn exponents(m: &DiffModule, opts: &HltOptions) -> Result<Vec<Rat>> {
    let reg = is_regular(m, opts)?;
    if !reg.regular {
        return Err(Error::Precondition("exponents are defined for regular modules".into()));
    }
    let mut ex = reg.exponents;
    ex.sort();
    Ok(ex)
}

#[cfg(test)]
mod tests;
