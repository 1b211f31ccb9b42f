//! Partial irregularities `F_i(M, r)` of modules over the two-variable rings,
//! as exact piecewise-linear functions on the weight cone, and the numerical
//! criterion for good decompositions built on them.
//!
//! At a weight `r` the module is read through the Euler derivation
//! `D_r = a x d/dx + b y d/dy`, where `(a, b)` is the primitive integer
//! vector on the ray of `r`: the capped Newton-polygon log-scales of a cyclic
//! relation for `D_r` form the absolute scale multiset, and `F_i(M, r)` is
//! the sum of its `i` largest entries.  Each `F_i` is convex, homogeneous and
//! piecewise linear, so it is recovered exactly from its values.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::diffmod::{BaseKind, DiffModule};
use crate::error::{Error, Result};
use crate::hlt::{is_regular, HltOptions};
use crate::series::rat::primitive_integer_ray;
use crate::series::{fmt_rat, rat, Rat};
use crate::tropical::{reconstruct_convex_on_cone, Budget, DiffPL, Linearity, PLFunction};
use crate::twisted::{cyclic_vector, newton_polygon};

#[cfg(test)]
mod tests;

/// Knobs shared by the two-variable analyses.
#[derive(Clone, Debug)]
pub struct IrregOptions {
    pub seed: u64,
    pub budget: Budget,
}

impl Default for IrregOptions {
    fn default() -> Self {
        IrregOptions { seed: 0, budget: Budget::default() }
    }
}

/// Which derivation is used to read the scales at a weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// `D_r` along the ray of the weight (always valid for `r != 0`).
    Weighted,
    /// `x d/dx`, meaningful for `r1 > 0`.
    X,
    /// `y d/dy`, meaningful for `r2 > 0`.
    Y,
}

fn require_bivariate(m: &DiffModule) -> Result<()> {
    match m.base().kind {
        BaseKind::R21 | BaseKind::R22 => Ok(()),
        BaseKind::Kz => Err(Error::Input("partial irregularities need a module over R21 or R22".into())),
    }
}

fn check_weight(r: &[Rat; 2]) -> Result<()> {
    if r[0].is_negative() || r[1].is_negative() {
        return Err(Error::InvalidWeight(format!("({}, {}) lies outside the cone", fmt_rat(&r[0]), fmt_rat(&r[1]))));
    }
    if r[0].is_zero() && r[1].is_zero() {
        return Err(Error::InvalidWeight("the zero weight has no scales".into()));
    }
    Ok(())
}

/// Euler weights of the derivation used at `r`.
fn derivation_weights(r: &[Rat; 2], der: Derivation) -> Result<[Rat; 2]> {
    match der {
        Derivation::Weighted => {
            let ray = primitive_integer_ray(r);
            Ok([Rat::from_integer(ray[0].clone()), Rat::from_integer(ray[1].clone())])
        }
        Derivation::X if r[0].is_positive() => Ok([rat(1), rat(0)]),
        Derivation::Y if r[1].is_positive() => Ok([rat(0), rat(1)]),
        _ => Err(Error::InvalidWeight("the chosen derivation vanishes on this weight".into())),
    }
}

/// Capped log-scales at `r` read through the chosen derivation, largest first.
pub fn scale_multiset_with(m: &DiffModule, r: &[Rat; 2], der: Derivation, seed: u64) -> Result<Vec<Rat>> {
    require_bivariate(m)?;
    check_weight(r)?;
    let w = derivation_weights(r, der)?;
    let mut out = Vec::with_capacity(m.rank());
    for (_, block) in m.blocks() {
        if block.rank() == 1 {
            let f = &block.euler_matrix(&w)[0][0];
            let s = f.gauss_log_norm(r).unwrap_or_else(Rat::zero);
            out.push(if s.is_positive() { s } else { Rat::zero() });
            continue;
        }
        let cv = cyclic_vector(&block, &w, seed)?;
        out.extend(newton_polygon(&cv.poly, r).log_scales());
    }
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

/// Absolute scale multiset (log-scales, largest first) of `M` at weight `r`.
pub fn scale_multiset_at(m: &DiffModule, r: &[Rat; 2], seed: u64) -> Result<Vec<Rat>> {
    scale_multiset_with(m, r, Derivation::Weighted, seed)
}

/// Memoized scale oracle on the normalized segment `r1 + r2 = 1`.
struct ScaleOracle<'a> {
    m: &'a DiffModule,
    seed: u64,
    memo: BTreeMap<[Rat; 2], Vec<Rat>>,
}

impl ScaleOracle<'_> {
    fn at(&mut self, r: &[Rat; 2]) -> Result<Vec<Rat>> {
        check_weight(r)?;
        let s = &r[0] + &r[1];
        let key = [&r[0] / &s, &r[1] / &s];
        if !self.memo.contains_key(&key) {
            let v = scale_multiset_at(self.m, &key, self.seed)?;
            self.memo.insert(key.clone(), v);
        }
        Ok(self.memo[&key].iter().map(|x| x * &s).collect())
    }
}

/// The functions `F_1, ..., F_d` of a module and their successive differences.
#[derive(Clone, Debug)]
pub struct IrregularityProfile {
    pub label: String,
    pub base: BaseKind,
    pub rank: usize,
    /// `partials[i - 1] = F_i`.
    pub partials: Vec<PLFunction>,
    /// `diffs[i - 1] = f_i = F_i - F_(i-1)`.
    pub diffs: Vec<DiffPL>,
}

impl IrregularityProfile {
    pub fn top(&self) -> &PLFunction {
        self.partials.last().expect("modules have positive rank")
    }

    pub fn partial(&self, i: usize) -> &PLFunction {
        &self.partials[i - 1]
    }

    /// Linearity status of each `F_i`.
    pub fn statuses(&self) -> Vec<Linearity> {
        self.partials.iter().map(|f| f.is_linear_on_cone()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "base": self.base.name(),
            "rank": self.rank,
            "partials": self.partials.iter().enumerate().map(|(i, f)| json!({
                "index": i + 1,
                "function": f.to_string(),
                "pl": f.to_json(),
                "linear": f.is_linear_on_cone().linear,
            })).collect::<Vec<_>>(),
            "differences": self.diffs.iter().enumerate().map(|(i, f)| json!({
                "index": i + 1,
                "pl": f.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Reconstructs every partial irregularity of a flat module.
pub fn irregularity_profile(m: &DiffModule, opts: &IrregOptions) -> Result<IrregularityProfile> {
    require_bivariate(m)?;
    if !m.check_flat() {
        return Err(Error::Precondition("the connection is not integrable".into()));
    }
    let d = m.rank();
    let mut oracle = ScaleOracle { m, seed: opts.seed, memo: BTreeMap::new() };
    let mut partials = Vec::with_capacity(d);
    for i in 1..=d {
        let f = reconstruct_convex_on_cone(|r| Ok(oracle.at(r)?.iter().take(i).sum()), &opts.budget)?;
        partials.push(f.canonicalize());
    }
    let mut diffs = Vec::with_capacity(d);
    let mut prev = PLFunction::zero();
    for f in &partials {
        diffs.push(DiffPL::new(f.clone(), prev.clone()));
        prev = f.clone();
    }
    Ok(IrregularityProfile { label: m.name(), base: m.base().kind, rank: d, partials, diffs })
}

/// Sorted partial sums of the capped Gauss norms of finitely many polar
/// parts, as PL functions: the irregularity profile of `sum E(phi_j)`
/// computed without any module machinery.
pub fn profile_of_exponentials(phis: &[crate::series::PuiseuxPoly], budget: &Budget) -> Result<Vec<PLFunction>> {
    let norms = |r: &[Rat; 2]| -> Vec<Rat> {
        let mut v: Vec<Rat> = phis
            .iter()
            .map(|p| p.gauss_log_norm(r).filter(|x| x.is_positive()).unwrap_or_else(Rat::zero))
            .collect();
        v.sort_by(|a, b| b.cmp(a));
        v
    };
    (1..=phis.len())
        .map(|i| Ok(reconstruct_convex_on_cone(|r| Ok(norms(r).iter().take(i).sum()), budget)?.canonicalize()))
        .collect()
}

/// Outcome of the numerical criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    GoodAfterPullback,
    Fails,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::GoodAfterPullback => "GoodAfterPullback",
            Verdict::Fails => "Fails",
        }
    }
}

/// Linearity status of one partial irregularity.
#[derive(Clone, Debug)]
pub struct PartialStatus {
    pub index: usize,
    pub function: PLFunction,
    pub linearity: Linearity,
}

impl PartialStatus {
    fn to_json(&self) -> Value {
        let mut v = json!({
            "index": self.index,
            "function": self.function.to_string(),
            "linear": self.linearity.linear,
        });
        if let Some(f) = self.function.as_single() {
            v["functional"] = f.to_json();
        } else {
            v["witnesses"] = json!(self
                .linearity
                .witnesses
                .iter()
                .map(|w| [fmt_rat(&w[0]), fmt_rat(&w[1])])
                .collect::<Vec<_>>());
        }
        v
    }
}

/// Verdict with the evidence behind it.
#[derive(Clone, Debug)]
pub struct CriterionVerdict {
    pub verdict: Verdict,
    /// `F_d(M, .)`.
    pub top: PartialStatus,
    /// `F_(d^2)(End M, .)`.
    pub end_top: PartialStatus,
    /// Every `F_i(M, .)`.
    pub module_statuses: Vec<PartialStatus>,
    /// Every `F_i(End M, .)`.
    pub end_statuses: Vec<PartialStatus>,
}

impl CriterionVerdict {
    /// First non-linear partial irregularity of `End M`, if any.
    pub fn first_nonlinear_end(&self) -> Option<&PartialStatus> {
        self.end_statuses.iter().find(|s| !s.linearity.linear)
    }

    /// First non-linear partial irregularity of `M`, if any.
    pub fn first_nonlinear_module(&self) -> Option<&PartialStatus> {
        self.module_statuses.iter().find(|s| !s.linearity.linear)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.name(),
            "top": self.top.to_json(),
            "end_top": self.end_top.to_json(),
            "first_nonlinear_module": self.first_nonlinear_module().map(|s| s.to_json()),
            "first_nonlinear_end": self.first_nonlinear_end().map(|s| s.to_json()),
            "module_partials": self.module_statuses.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            "end_partials": self.end_statuses.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        })
    }
}

fn statuses(p: &IrregularityProfile) -> Vec<PartialStatus> {
    p.partials
        .iter()
        .enumerate()
        .map(|(i, f)| PartialStatus { index: i + 1, function: f.clone(), linearity: f.is_linear_on_cone() })
        .collect()
}

/// Decides whether `M` admits a good decomposition after a ramified pullback:
/// both `F_d(M, .)` and `F_(d^2)(End M, .)` must be linear on the cone.
pub fn criterion_check(m: &DiffModule, opts: &IrregOptions) -> Result<CriterionVerdict> {
    let pm = irregularity_profile(m, opts)?;
    let pe = irregularity_profile(&m.end(), opts)?;
    let module_statuses = statuses(&pm);
    let end_statuses = statuses(&pe);
    let top = module_statuses.last().unwrap().clone();
    let end_top = end_statuses.last().unwrap().clone();
    let verdict = if top.linearity.linear && end_top.linearity.linear { Verdict::GoodAfterPullback } else { Verdict::Fails };
    Ok(CriterionVerdict { verdict, top, end_top, module_statuses, end_statuses })
}

/// For `M = sum M_j` with `F_d(M, .)` linear, checks that each summand's top
/// partial irregularity is linear as well.
pub fn drop_affine_check(summands: &[DiffModule], opts: &IrregOptions) -> Result<Vec<bool>> {
    if summands.is_empty() {
        return Err(Error::Input("empty direct sum".into()));
    }
    let total = DiffModule::direct_sum_all(summands)?;
    let p = irregularity_profile(&total, opts)?;
    if !p.top().is_linear_on_cone().linear {
        return Err(Error::Precondition(format!("F_{} of the sum is not linear: {}", total.rank(), p.top())));
    }
    summands
        .iter()
        .map(|s| Ok(irregularity_profile(s, opts)?.top().is_linear_on_cone().linear))
        .collect()
}

/// Comparison of the multisets read through `x d/dx` and `y d/dy` at an
/// interior weight with the absolute one.
#[derive(Clone, Debug)]
pub struct CrossDerivation {
    pub weight: [Rat; 2],
    pub via_x: Vec<Rat>,
    pub via_y: Vec<Rat>,
    pub absolute: Vec<Rat>,
}

impl CrossDerivation {
    /// The two coordinate readings coincide.
    pub fn identical(&self) -> bool {
        self.via_x == self.via_y
    }

    /// Each coordinate reading is bounded by the absolute multiset entrywise,
    /// and the larger top scale equals the absolute top scale.
    pub fn consistent(&self) -> bool {
        let below = |v: &[Rat]| v.iter().zip(&self.absolute).all(|(a, b)| a <= b);
        let top = |v: &[Rat]| v.first().cloned().unwrap_or_else(Rat::zero);
        below(&self.via_x) && below(&self.via_y) && top(&self.via_x).max(top(&self.via_y)) == top(&self.absolute)
    }
}

pub fn cross_derivation(m: &DiffModule, r: &[Rat; 2], seed: u64) -> Result<CrossDerivation> {
    if !(r[0].is_positive() && r[1].is_positive()) {
        return Err(Error::InvalidWeight("cross-derivation comparison needs an interior weight".into()));
    }
    Ok(CrossDerivation {
        weight: r.clone(),
        via_x: scale_multiset_with(m, r, Derivation::X, seed)?,
        via_y: scale_multiset_with(m, r, Derivation::Y, seed)?,
        absolute: scale_multiset_at(m, r, seed)?,
    })
}

/// Restriction of `M` to the axis field of variable `var`: the other variable
/// is specialized to the rational value `at`, leaving a module over `Q((z))`
/// with `z` the variable `var`.
pub fn axis_restriction(m: &DiffModule, var: usize, at: &Rat) -> Result<DiffModule> {
    require_bivariate(m)?;
    let other = 1 - var;
    let mat = crate::diffmod::pmat_map(m.matrix(var), |e| {
        let s = e.eval_var(other, at).expect("integral exponents after specialization");
        let s = if var == 1 { s.swap_vars() } else { s };
        s.with_arity(1).with_poles([true, false])
    });
    let h = m.base().h;
    DiffModule::new(crate::diffmod::BaseRing::new(BaseKind::Kz, h), vec![mat], Some(format!("{} | axis {var}", m.name())))
}

/// Regularity of the restrictions to both axis fields (the other variable
/// specialized at `at`, which should avoid accidental cancellation).
pub fn axis_regularity(m: &DiffModule, at: &Rat, opts: &HltOptions) -> Result<[bool; 2]> {
    let rx = is_regular(&axis_restriction(m, 0, at)?, opts)?.regular;
    let ry = is_regular(&axis_restriction(m, 1, at)?, opts)?.regular;
    Ok([rx, ry])
}

/// Renders a weight as `(r1, r2)`.
pub fn fmt_weight(r: &[Rat; 2]) -> String {
    format!("({}, {})", fmt_rat(&r[0]), fmt_rat(&r[1]))
}

/// Midpoint convexity of `f` at `a`, `b`: `2 f((a+b)/2) <= f(a) + f(b)`.
pub fn midpoint_convex(f: &PLFunction, a: &[Rat; 2], b: &[Rat; 2]) -> bool {
    let mid = [(&a[0] + &b[0]) / rat(2), (&a[1] + &b[1]) / rat(2)];
    f.eval(&mid) * rat(2) <= f.eval(a) + f.eval(b)
}
