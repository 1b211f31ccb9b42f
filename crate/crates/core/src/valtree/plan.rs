//! Blowup plans: the divisorial valuations at which the irregularity of a
//! module or of its endomorphisms stops behaving linearly.
//!
//! Over `R21` the valuations are the joints and extremities of the skeleta of
//! `F_d(M, ·)` and `F_{d²}(End M, ·)`.  Over `R22` the plan lists the rays of
//! the weight cone where either function changes slope (toroidal data).
//! Blowups are recorded as valuations, not as coordinate charts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use super::{skeleton, DiscPoint, MisFunction, Role, Skeleton, SkeletonOptions};
use crate::diffmod::{BaseKind, DiffModule};
use crate::error::{Error, Result};
use crate::irregularity::{criterion_check, irregularity_profile, CriterionVerdict, IrregOptions};
use crate::series::rat::primitive_integer_ray;
use crate::series::{fmt_rat, rat, Rat};

#[derive(Clone, Debug, PartialEq)]
pub enum Valuation {
    /// Exceptional divisor over the disc point `α_{z, e^-q}`.
    Divisorial(DiscPoint),
    /// Monomial valuation with integer weights `(a, b)` on `(x, y)`.
    Toric([BigInt; 2]),
}

impl Valuation {
    pub fn to_json(&self) -> Value {
        match self {
            Valuation::Divisorial(p) => {
                let mut v = p.to_json();
                v["kind"] = json!("divisorial");
                v
            }
            Valuation::Toric(r) => json!({"kind": "toric", "ray": [r[0].to_string(), r[1].to_string()]}),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanStep {
    pub valuation: Valuation,
    /// Which functions produced the step: `"module"` and/or `"end"`.
    pub sources: Vec<String>,
    /// Number of point blowups that create the divisor, when the center is
    /// unramified (after the analytic change `y -> y - z`, this is the sum of
    /// the partial quotients of `q`).
    pub point_blowups: Option<u64>,
}

impl PlanStep {
    pub fn to_json(&self) -> Value {
        json!({
            "valuation": self.valuation.to_json(),
            "sources": self.sources,
            "point_blowups": self.point_blowups,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupPlan {
    pub base: BaseKind,
    pub steps: Vec<PlanStep>,
    /// Which points of the modified surface deserve their own stratum.
    pub strata: Vec<String>,
    /// Skeleta consulted (module first, then End), over `R21` only.
    pub skeleta: Vec<Skeleton>,
}

impl BlowupPlan {
    pub fn point_blowup_count(&self) -> Option<u64> {
        self.steps
            .iter()
            .filter(|s| matches!(s.valuation, Valuation::Divisorial(_)))
            .map(|s| s.point_blowups)
            .sum()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base.name(),
            "steps": self.steps.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            "point_blowups": self.point_blowup_count(),
            "strata": self.strata,
            "skeleta": self.skeleta.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Sum of the partial quotients of the continued fraction of `q > 0`.
fn partial_quotient_sum(q: &Rat) -> u64 {
    let (mut a, mut b) = (q.numer().clone(), q.denom().clone());
    let mut s = BigInt::zero();
    while !b.is_zero() {
        let (k, r) = a.div_rem(&b);
        s += k;
        a = b;
        b = r;
    }
    s.to_u64().expect("blowup count fits")
}

fn add_step(steps: &mut Vec<PlanStep>, valuation: Valuation, source: &str, point_blowups: Option<u64>) {
    if let Some(s) = steps.iter_mut().find(|s| s.valuation == valuation) {
        if !s.sources.iter().any(|x| x == source) {
            s.sources.push(source.to_string());
        }
        return;
    }
    steps.push(PlanStep { valuation, sources: vec![source.to_string()], point_blowups });
}

/// Plan for a flat module over `R21` (skeleta) or `R22` (toric rays).
pub fn blowup_plan(m: &DiffModule, opts: &SkeletonOptions) -> Result<BlowupPlan> {
    let end = m.end();
    let mut steps: Vec<PlanStep> = Vec::new();
    let mut skeleta = Vec::new();
    match m.base().kind {
        BaseKind::R21 => {
            for (src, module) in [("module", m), ("end", &end)] {
                let sk = skeleton(&MisFunction::irregularity(module)?, opts)?;
                if !sk.is_conclusive() {
                    return Err(Error::BudgetExhausted(format!(
                        "skeleton of the {src} function still decreasing at q = {}",
                        fmt_rat(&opts.q_max)
                    )));
                }
                for n in sk.nodes.iter().filter(|n| n.role != Role::Head) {
                    let blowups = (n.point.degree() == 1).then(|| partial_quotient_sum(n.point.q()));
                    add_step(&mut steps, Valuation::Divisorial(n.point.clone()), src, blowups);
                }
                skeleta.push(sk);
            }
            // Ancestors first: dominating points have smaller depth.
            steps.sort_by(|a, b| match (&a.valuation, &b.valuation) {
                (Valuation::Divisorial(p), Valuation::Divisorial(q)) => {
                    p.q().cmp(q.q()).then_with(|| p.to_string().cmp(&q.to_string()))
                }
                _ => std::cmp::Ordering::Equal,
            });
        }
        BaseKind::R22 => {
            let io = IrregOptions { seed: opts.seed, budget: opts.budget.clone() };
            for (src, module) in [("module", m), ("end", &end)] {
                let prof = irregularity_profile(module, &io)?;
                let restr = prof.top().restrict_to_segment(&[rat(1), Rat::zero()], &[Rat::zero(), rat(1)]);
                for t in restr.breakpoints() {
                    let ray = primitive_integer_ray(&[rat(1) - &t, t.clone()]);
                    add_step(&mut steps, Valuation::Toric([ray[0].clone(), ray[1].clone()]), src, None);
                }
            }
            steps.sort_by(|a, b| match (&a.valuation, &b.valuation) {
                (Valuation::Toric(r), Valuation::Toric(s)) => {
                    (Rat::new(r[1].clone(), &r[0] + &r[1])).cmp(&Rat::new(s[1].clone(), &s[0] + &s[1]))
                }
                _ => std::cmp::Ordering::Equal,
            });
        }
        BaseKind::Kz => return Err(Error::Input("blowup plans need a two-variable base".into())),
    }
    let strata = steps
        .iter()
        .map(|s| match &s.valuation {
            Valuation::Divisorial(p) => format!(
                "exceptional divisor of {p}: its crossings with the strict transforms of x = 0 and of y = z(x) are separate strata"
            ),
            Valuation::Toric(r) => format!("toric divisor of ray ({}, {}): its two torus-fixed points are separate strata", r[0], r[1]),
        })
        .collect();
    Ok(BlowupPlan { base: m.base().kind, steps, strata, skeleta })
}

/// Criterion verdict in one chart of a modification.
#[derive(Clone, Debug)]
pub struct ChartVerdict {
    pub chart: String,
    pub module: DiffModule,
    pub verdict: CriterionVerdict,
}

impl ChartVerdict {
    pub fn to_json(&self) -> Value {
        json!({"chart": self.chart, "base": self.module.base().kind.name(), "criterion": self.verdict.to_json()})
    }
}

/// Runs the criterion at the two crossing points of the exceptional divisor
/// of the blowup of the origin: `(x, v)` with `y = x v` (poles along `x`) and
/// `(u, y)` with `x = u y` (poles along `u` and `y`).
pub fn origin_blowup_verdicts(m: &DiffModule, opts: &IrregOptions) -> Result<Vec<ChartVerdict>> {
    let charts = [("y = x*v", m.blowup_chart_a()?), ("x = u*y", m.blowup_chart_b()?)];
    charts
        .into_iter()
        .map(|(name, module)| {
            let verdict = criterion_check(&module, opts)?;
            Ok(ChartVerdict { chart: name.to_string(), module, verdict })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ratq;

    #[test]
    fn continued_fraction_counts() {
        assert_eq!(partial_quotient_sum(&rat(1)), 1);
        assert_eq!(partial_quotient_sum(&rat(2)), 2);
        assert_eq!(partial_quotient_sum(&ratq(3, 2)), 3);
        assert_eq!(partial_quotient_sum(&ratq(7, 5)), 1 + 2 + 2);
    }
}
