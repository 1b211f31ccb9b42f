//! Levelt–Turrittin recursion on the cyclic relation of a module over `Q((z))`.

use num_traits::Zero;
use serde_json::{json, Value};

use super::{is_regular, require_kz, HltOptions};
use crate::diffmod::{BaseKind, BaseRing, DiffModule, PMatrix};
use crate::error::{Error, Result};
use crate::series::rat::{denom_u32, lcm_u32};
use crate::series::{fmt_rat, rat, PuiseuxPoly, Rat, TruncatedSeries, UPoly};
use crate::twisted::{cyclic_vector, newton_polygon, slope_factor, RationalFunction, TwistedPoly};

/// One summand `E(phi) (x) R` of the decomposition after pulling back to
/// `Q((z^(1/h)))`.
#[derive(Clone, Debug)]
pub struct HltSummand {
    /// Polar part in `z^(-1/h) Q[z^(-1/h)]`.
    pub phi: PuiseuxPoly,
    pub h: u32,
    pub rank: usize,
    /// Regular factor as a module over `Q((z^(1/h)))` (companion form).
    pub regular_part: DiffModule,
    /// Exponents of the regular factor for `w d/dw`, `w = z^(1/h)`, in `[0, 1)`.
    pub exponents: Vec<Rat>,
    /// `E(-phi) (x) summand` passed the lattice regularity test.
    pub twist_back_regular: bool,
}

impl HltSummand {
    pub fn to_json(&self) -> Value {
        json!({
            "phi": self.phi.to_string_with(&["z"]),
            "h": self.h,
            "rank": self.rank,
            "exponents": self.exponents.iter().map(fmt_rat).collect::<Vec<_>>(),
            "twist_back_regular": self.twist_back_regular,
        })
    }
}

fn z_mono(e: &Rat, c: &Rat) -> PuiseuxPoly {
    PuiseuxPoly::monomial(1, [e.clone(), Rat::zero()], c.clone()).with_poles([true, false])
}

fn to_series(c: &RationalFunction, n: &Rat) -> Result<TruncatedSeries> {
    if c.is_zero() {
        return Ok(TruncatedSeries::zero_mod(n.clone()));
    }
    let inv = TruncatedSeries::exact(c.den().clone()).inverse(n)?;
    Ok((&inv * &TruncatedSeries::exact(c.num().clone())).with_precision(n.clone()))
}

fn min_precision(p: &TwistedPoly<TruncatedSeries>) -> Option<Rat> {
    p.coeffs().iter().filter_map(|c| c.precision().cloned()).min()
}

struct Leaf {
    phi: PuiseuxPoly,
    h: u32,
    factor: TwistedPoly<TruncatedSeries>,
}

struct Ctx<'a> {
    opts: &'a HltOptions,
    leaves: Vec<Leaf>,
}

impl Ctx<'_> {
    fn recurse(&mut self, p: &TwistedPoly<TruncatedSeries>, phi: &PuiseuxPoly, h: u32, depth: usize) -> Result<()> {
        if depth > 8 * p.degree().max(1) + 8 {
            return Err(Error::BudgetExhausted("decomposition recursion too deep".into()));
        }
        let n = match min_precision(p) {
            Some(n) => crate::series::rat::floor(&n),
            None => (self.opts.precision + 8).into(),
        };
        let n: i64 = n.try_into().unwrap_or(i64::MAX / 4);
        if n < 1 {
            return Err(Error::PrecisionExhausted("cyclic relation lost all precision; raise --precision".into()));
        }
        for f in slope_factor(p, n)? {
            let scales = newton_polygon(&f, &[rat(1)]).log_scales();
            let mu = scales[0].clone();
            if mu.is_zero() {
                self.leaves.push(Leaf { phi: phi.clone(), h, factor: f });
                continue;
            }
            let hh = lcm_u32(h, denom_u32(&mu));
            if hh > self.opts.h_max {
                return Err(Error::BudgetExhausted(format!("ramification index {hh} exceeds h_max = {}", self.opts.h_max)));
            }
            let m = f.degree();
            let lc: Vec<Rat> =
                (0..=m).map(|i| f.coeff(i).body().coeff(&[-(&mu * rat((m - i) as i64)), Rat::zero()])).collect();
            let q = UPoly::new(lc);
            let (roots, rest) = q.rational_roots()?;
            if rest.degree().unwrap_or(0) > 0 {
                return Err(Error::ExtensionRequired {
                    poly: q.to_string_var("c"),
                    context: format!("leading coefficients of the slope {}", fmt_rat(&mu)),
                });
            }
            for (c, k) in roots {
                let psi = TruncatedSeries::exact(z_mono(&(-&mu), &c));
                let g = f.substitute_shift(&psi);
                let ng = min_precision(&g).map(|x| crate::series::rat::floor(&x)).unwrap_or_else(|| n.into());
                let ng: i64 = ng.try_into().unwrap_or(i64::MAX / 4);
                if ng < 1 {
                    return Err(Error::PrecisionExhausted("twisting lost all precision; raise --precision".into()));
                }
                let parts = slope_factor(&g, ng)?;
                let mut kept = 0;
                let phi2 = phi + &z_mono(&(-&mu), &(-(&c / &mu)));
                for part in parts {
                    let s = newton_polygon(&part, &[rat(1)]).log_scales();
                    if s[0] < mu {
                        kept += part.degree();
                        self.recurse(&part, &phi2, hh, depth + 1)?;
                    }
                }
                if kept != k {
                    return Err(Error::PrecisionExhausted(format!(
                        "twist by {} split off degree {kept}, expected {k}",
                        psi.body().to_string_with(&["z"])
                    )));
                }
            }
        }
        Ok(())
    }
}

fn companion_module(f: &TwistedPoly<TruncatedSeries>, h: u32) -> Result<(DiffModule, u32)> {
    let k = f.degree();
    let mut n: PMatrix = vec![vec![PuiseuxPoly::zero().with_arity(1); k]; k];
    let mut hh = h;
    for i in 0..k {
        if i + 1 < k {
            n[i + 1][i] = PuiseuxPoly::one().with_arity(1);
        }
        let e = -f.coeff(i).body();
        hh = lcm_u32(hh, e.minimal_h());
        n[i][k - 1] = e;
    }
    let m = DiffModule::new(BaseRing::new(BaseKind::Kz, hh), vec![n], Some("regular part".into()))?;
    Ok((m, hh))
}

/// Decomposes `M` (after ramification) as `sum E(phi_j) (x) R_j` with each
/// `R_j` regular; summands with the same `phi` are merged.
pub fn hlt_decompose(m: &DiffModule, opts: &HltOptions) -> Result<Vec<HltSummand>> {
    require_kz(m)?;
    let mut leaves = Vec::new();
    for (_, block) in m.blocks() {
        let w = [rat(1), rat(0)];
        let cv = cyclic_vector(&block, &w, opts.seed)?;
        let pole = cv
            .poly
            .coeffs()
            .iter()
            .filter_map(|c| c.log_norm(&[rat(1)]))
            .max()
            .unwrap_or_else(Rat::zero)
            .max(Rat::zero());
        let d = block.rank() as i64;
        let work = rat(opts.precision + 4) + pole * rat(d);
        let coeffs = cv.poly.coeffs().iter().map(|c| to_series(c, &work)).collect::<Result<Vec<_>>>()?;
        let p = TwistedPoly::new(coeffs, w);
        let mut ctx = Ctx { opts, leaves: Vec::new() };
        ctx.recurse(&p, &PuiseuxPoly::zero().with_arity(1), m.base().h, 0)?;
        leaves.extend(ctx.leaves);
    }
    // merge equal polar parts
    let mut groups: Vec<(PuiseuxPoly, Vec<Leaf>)> = Vec::new();
    for leaf in leaves {
        match groups.iter_mut().find(|(p, _)| *p == leaf.phi) {
            Some((_, v)) => v.push(leaf),
            None => groups.push((leaf.phi.clone(), vec![leaf])),
        }
    }
    let mut out = Vec::new();
    for (phi, group) in groups {
        let mut h = group.iter().fold(1, |a, l| lcm_u32(a, l.h));
        let mut parts = Vec::new();
        for l in &group {
            let (cm, hh) = companion_module(&l.factor, l.h)?;
            h = lcm_u32(h, hh);
            parts.push(cm);
        }
        let parts: Vec<DiffModule> = parts.into_iter().map(|p| p.pullback_ramified(h)).collect();
        let reg = DiffModule::direct_sum_all(&parts)?.with_label(format!("R[{}]", phi.to_string_with(&["z"])));
        let r = is_regular(&reg, opts)?;
        let mut exponents = r.exponents.clone();
        exponents.sort();
        out.push(HltSummand {
            phi,
            h,
            rank: reg.rank(),
            regular_part: reg,
            exponents,
            twist_back_regular: r.regular,
        });
    }
    out.sort_by(|a, b| a.phi.to_string_with(&["z"]).cmp(&b.phi.to_string_with(&["z"])));
    Ok(out)
}
