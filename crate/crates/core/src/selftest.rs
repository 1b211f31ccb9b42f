//! The acceptance checks, run against a [`Corpus`].
//!
//! Each criterion is an exact check: no tolerances, no sampling of floats.
//! Random inputs come from a seeded ChaCha generator so every run sees the
//! same instances.  A criterion that is known not to hold as stated carries a
//! note; it still runs, and still reports FAIL when it fails.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::corpus::{build_module, field, scale_case, str_field, weight, Corpus};
use crate::diffmod::{module_from_json, pmat_identity, BaseKind, DiffModule};
use crate::error::{Error, Result};
use crate::hlt::{
    fundamental_solution, hlt_decompose, irreg_lattice_oracle, irregularity_limit, is_regular, polygon_regular,
    solution_residual, standard_lattice, tau_check, HltOptions,
};
use crate::irregularity::{
    cross_derivation, irregularity_profile, midpoint_convex, IrregOptions, Verdict,
};
use crate::report::{affine_offset, AnalysisOptions, Command, Report};
use crate::series::{fmt_rat, parse_poly, parse_rat, rat, ratq, PuiseuxPoly, Rat};
use crate::tropical::{AffineFunctional, PLFunction};
use crate::twisted::{newton_polygon, TwistedPoly};
use crate::valtree::{
    blowup_plan, check_skeleton_joints, origin_blowup_verdicts, skeleton, DiscPoint, MisFunction, Role,
    SkeletonOptions,
};

/// Seed of every randomized instance generator below.
const SEED: u64 = 0x5EED;

/// Result of one criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    /// Set when the criterion is documented not to hold as stated.
    pub known_failure: Option<&'static str>,
    pub detail: String,
}

impl Outcome {
    /// Failures that should make a run unsuccessful.
    pub fn is_unexpected_failure(&self) -> bool {
        !self.passed && self.known_failure.is_none()
    }

    pub fn line(&self) -> String {
        let status = match (self.passed, self.known_failure) {
            (true, _) => "PASS",
            (false, None) => "FAIL",
            (false, Some(_)) => "FAIL (known)",
        };
        let mut s = format!("criterion {:<3} {status:<12} {}: {}", self.id, self.title, self.detail);
        if let (false, Some(why)) = (self.passed, self.known_failure) {
            s.push_str(&format!(" [{why}]"));
        }
        s
    }
}

type Check = fn(&Corpus) -> Result<(bool, String)>;

/// A named acceptance check.
pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub known_failure: Option<&'static str>,
    check: Check,
}

impl Criterion {
    pub fn run(&self, corpus: &Corpus) -> Outcome {
        let (passed, detail) = match (self.check)(corpus) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        Outcome { id: self.id, title: self.title, passed, known_failure: self.known_failure, detail }
    }
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, title, check| Criterion { id, title, known_failure: None, check };
    vec![
        c("1", "scale of E(phi) equals the capped Gauss norm", scale_of_exponentials),
        Criterion {
            id: "2",
            title: "x- and y-derived scale multisets identical",
            known_failure: Some(
                "coordinate derivations see only part of the scale at interior weights, e.g. E(1/x) at (1,1) gives {1} vs {0}",
            ),
            check: cross_identical,
        },
        c("2'", "coordinate scale multisets bounded by and attaining the absolute one", cross_consistent),
        c("3", "Newton polygon of a product is the merged polygon", polygon_multiplicativity),
        c("4", "regularity tests agree pairwise", regularity_equivalences),
        c("5", "lattice growth of E(z^-a) is a per step", lattice_growth),
        c("6", "HLT recovers exponentials and exponents", hlt_round_trip),
        c("7", "fundamental solutions solve the system exactly", fundamental_solutions),
        c("8", "fractional-part section is admissible", admissible_section),
        c("9", "criterion on the four-summand example", counterexample),
        c("10", "partial irregularities are convex and nonincreasing in r2", convexity),
        c("11", "subharmonicity at skeleton joints", subharmonicity),
        c("12", "turning point of E(y/x) resolved by one blowup", turning_point),
        c("13", "reports are byte-identical across runs", determinism),
    ]
}

/// Runs every criterion in order.
pub fn run(corpus: &Corpus) -> Vec<Outcome> {
    criteria().iter().map(|c| c.run(corpus)).collect()
}

fn weights(corpus: &Corpus, file: &str) -> Result<Vec<[Rat; 2]>> {
    corpus.list(file, "weights")?.iter().map(weight).collect()
}

fn scale_of_exponentials(corpus: &Corpus) -> Result<(bool, String)> {
    let ws = weights(corpus, "scales.json")?;
    let (mut ok, mut total, mut first_bad) = (0, 0, None);
    for case in corpus.list("scales.json", "cases")? {
        let (m, phi) = scale_case(case)?;
        for r in &ws {
            total += 1;
            let g = phi.gauss_log_norm(r).unwrap_or_else(Rat::zero);
            let expect = vec![if g.is_positive() { g } else { Rat::zero() }];
            let got = crate::irregularity::scale_multiset_at(&m, r, 0)?;
            if got == expect {
                ok += 1;
            } else if first_bad.is_none() {
                first_bad = Some(format!("{} at ({}, {})", m.name(), fmt_rat(&r[0]), fmt_rat(&r[1])));
            }
        }
    }
    let mut detail = format!("{ok}/{total} exact");
    if let Some(b) = first_bad {
        detail.push_str(&format!("; first mismatch {b}"));
    }
    Ok((ok == total, detail))
}

fn cross_runs(corpus: &Corpus) -> Result<Vec<crate::irregularity::CrossDerivation>> {
    let ws = weights(corpus, "cross.json")?;
    let mut out = Vec::new();
    for m in corpus.modules("cross.json", "modules")? {
        if m.rank() > 4 {
            return Err(Error::Input("cross-derivation modules have rank at most 4".into()));
        }
        for r in &ws {
            out.push(cross_derivation(&m, r, 0)?);
        }
    }
    Ok(out)
}

fn cross_identical(corpus: &Corpus) -> Result<(bool, String)> {
    let runs = cross_runs(corpus)?;
    let same = runs.iter().filter(|c| c.identical()).count();
    Ok((same == runs.len(), format!("{same}/{} (module, weight) pairs identical", runs.len())))
}

fn cross_consistent(corpus: &Corpus) -> Result<(bool, String)> {
    let runs = cross_runs(corpus)?;
    let good = runs.iter().filter(|c| c.consistent()).count();
    Ok((good == runs.len(), format!("{good}/{} (module, weight) pairs consistent", runs.len())))
}

fn random_coeff(rng: &mut ChaCha8Rng) -> PuiseuxPoly {
    let mut p = PuiseuxPoly::zero();
    for _ in 0..rng.gen_range(0..3) {
        let c = rng.gen_range(-3i64..=3);
        let (a, b) = (rng.gen_range(-4i64..=1), rng.gen_range(-4i64..=1));
        p = &p + &PuiseuxPoly::mono_int(2, a, b, rat(c));
    }
    p.with_poles([true, true])
}

fn random_monic(rng: &mut ChaCha8Rng, w: &[Rat; 2]) -> TwistedPoly<PuiseuxPoly> {
    let d = rng.gen_range(1..=3);
    TwistedPoly::monic((0..d).map(|_| random_coeff(rng)).collect(), w.clone())
}

fn polygon_multiplicativity(_: &Corpus) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let weights = [[rat(1), rat(0)], [rat(0), rat(1)], [rat(1), rat(1)], [rat(2), rat(3)], [ratq(1, 2), rat(5)]];
    let (mut ok, mut total) = (0, 0);
    for _ in 0..50 {
        let w = [rat(rng.gen_range(1..=2)), rat(rng.gen_range(0..=2))];
        let a = random_monic(&mut rng, &w);
        let b = random_monic(&mut rng, &w);
        let prod = a.twisted_mul(&b);
        for r in &weights {
            total += 1;
            let mut merged = newton_polygon(&a, r).log_scales();
            merged.extend(newton_polygon(&b, r).log_scales());
            merged.sort_by(|x, y| y.cmp(x));
            if newton_polygon(&prod, r).log_scales() == merged {
                ok += 1;
            }
        }
    }
    Ok((ok == total, format!("{ok}/{total} (pair, weight) polygons multiplicative")))
}

fn identity_basis(d: usize) -> crate::diffmod::PMatrix {
    pmat_identity(d).into_iter().map(|r| r.into_iter().map(|e| e.with_arity(1)).collect()).collect()
}

fn regularity_equivalences(corpus: &Corpus) -> Result<(bool, String)> {
    let opts = HltOptions::default();
    let mut agree = 0;
    let entries = corpus.list("regularity.json", "modules")?;
    let mut bad = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let m = build_module(field(e, "module")?)?;
        let expected = field(e, "regular")?.as_bool().ok_or_else(|| Error::Input("`regular` must be a boolean".into()))?;
        let by_polygon = polygon_regular(&m, 0)?;
        let by_lattice = is_regular(&m, &opts)?.regular;
        let run = irregularity_limit(&m, &identity_basis(m.rank()), 16)?;
        let by_oracle = run.limit.as_ref().map(|l| l.is_zero());
        if by_oracle == Some(by_polygon) && by_polygon == by_lattice && by_lattice == expected {
            agree += 1;
        } else {
            bad.push(format!("#{i} polygon={by_polygon} lattice={by_lattice} oracle={by_oracle:?} expected={expected}"));
        }
    }
    let mut detail = format!("{agree}/{} modules with all three tests agreeing", entries.len());
    if !bad.is_empty() {
        detail.push_str(&format!("; {}", bad.join(", ")));
    }
    Ok((agree == entries.len(), detail))
}

fn lattice_growth(_: &Corpus) -> Result<(bool, String)> {
    let mut ok = true;
    let mut seen = Vec::new();
    for a in 1..=4i64 {
        let e = DiffModule::e_phi(&parse_poly(&format!("z^-{a}"), &["z"])?, crate::diffmod::BaseRing::new(BaseKind::Kz, 1))?;
        let ratios: Vec<Rat> = (1..=8)
            .map(|s| irreg_lattice_oracle(&e, &identity_basis(1), s).map(|l| ratq(l, s as i64)))
            .collect::<Result<_>>()?;
        ok &= ratios.iter().all(|x| *x == rat(a));
        seen.push(format!("a={a}: {}", ratios.iter().map(fmt_rat).collect::<Vec<_>>().join(",")));
    }
    Ok((ok, format!("l(D^s W, W)/s for s = 1..8: {}", seen.join("; "))))
}

/// `(phi, h) -> (rank, sorted exponents)`, merging equal keys.
fn group(items: Vec<(String, u32, Vec<Rat>)>) -> std::collections::BTreeMap<(String, u32), (usize, Vec<Rat>)> {
    let mut out: std::collections::BTreeMap<(String, u32), (usize, Vec<Rat>)> = Default::default();
    for (phi, h, ex) in items {
        let e = out.entry((phi, h)).or_default();
        e.0 += ex.len();
        e.1.extend(ex);
        e.1.sort();
    }
    out
}

fn hlt_round_trip(corpus: &Corpus) -> Result<(bool, String)> {
    let cases = corpus.list("hlt_roundtrip.json", "cases")?;
    let mut ok = 0;
    let mut bad = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        let m = build_module(field(case, "module")?)?;
        let parts = hlt_decompose(&m, &HltOptions::default())?;
        let got = group(
            parts.iter().map(|p| (p.phi.to_string_with(&["z"]), p.h, p.exponents.clone())).collect(),
        );
        let mut want = Vec::new();
        for e in field(case, "expect")?.as_array().ok_or_else(|| Error::Input("`expect` must be a list".into()))? {
            let phi = parse_poly(str_field(e, "phi")?, &["z"])?.with_poles([true, false]);
            let h = field(e, "h")?.as_u64().ok_or_else(|| Error::Input("`h` must be an integer".into()))? as u32;
            let ex = field(e, "exponents")?
                .as_array()
                .ok_or_else(|| Error::Input("`exponents` must be a list".into()))?
                .iter()
                .map(|x| parse_rat(x.as_str().unwrap_or("?")))
                .collect::<Result<Vec<_>>>()?;
            want.push((phi.to_string_with(&["z"]), h, ex));
        }
        let want = group(want);
        let twist_back = parts.iter().all(|p| p.twist_back_regular);
        if got == want && twist_back && parts.iter().map(|p| p.rank).sum::<usize>() == m.rank() {
            ok += 1;
        } else {
            bad.push(format!("case {i}: got {got:?}"));
        }
    }
    let mut detail = format!("{ok}/{} modules recovered", cases.len());
    if !bad.is_empty() {
        detail.push_str(&format!("; {}", bad.join("; ")));
    }
    Ok((ok == cases.len(), detail))
}

fn fundamental_solutions(corpus: &Corpus) -> Result<(bool, String)> {
    let n = corpus.json("solutions.json").get("precision").and_then(Value::as_i64).unwrap_or(16);
    let opts = HltOptions::default();
    let modules = corpus.modules("solutions.json", "modules")?;
    let mut solved = 0;
    for m in &modules {
        let reg = is_regular(m, &opts)?;
        let Some(l) = reg.lattice else { continue };
        let u = fundamental_solution(&l, n)?;
        if solution_residual(&l, &u, n).iter().flatten().all(|e| e.is_zero()) {
            solved += 1;
        }
    }
    let entries = corpus.list("solutions.json", "non_prepared")?;
    let mut predicted = 0;
    for e in entries {
        let m = build_module(field(e, "module")?)?;
        let order = parse_rat(str_field(e, "order")?)?;
        match fundamental_solution(&standard_lattice(&m), n) {
            Err(Error::SingularSylvester { order: o }) if o == order => predicted += 1,
            _ => {}
        }
    }
    let ok = solved == modules.len() && predicted == entries.len();
    Ok((
        ok,
        format!(
            "residual 0 mod z^{n} on {solved}/{}; non-prepared failures at the predicted order {predicted}/{}",
            modules.len(),
            entries.len()
        ),
    ))
}

fn admissible_section(_: &Corpus) -> Result<(bool, String)> {
    let (mut ok, mut total) = (0, 0);
    for q in 1..=12i64 {
        for p in -24..=24i64 {
            for a in 1..=10 {
                total += 1;
                if tau_check(&ratq(p, q), a) {
                    ok += 1;
                }
            }
        }
    }
    Ok((ok == total, format!("{ok}/{total} (lambda, a) pairs")))
}

fn lin(a: i64, b: i64) -> PLFunction {
    PLFunction::new(vec![AffineFunctional::linear(rat(a), rat(b))])
}

fn max_r1_r2() -> PLFunction {
    PLFunction::new(vec![AffineFunctional::linear(rat(1), rat(0)), AffineFunctional::linear(rat(0), rat(1))])
}

fn counterexample(corpus: &Corpus) -> Result<(bool, String)> {
    let report = Report::run(Command::Criterion, "example_counter.json", corpus.text("example_counter.json"), &AnalysisOptions::default());
    let v = report.to_json();
    let r = v.get("result").ok_or_else(|| Error::Precondition(format!("criterion report failed: {}", v["error"])))?;
    let input = crate::report::Input::from_json(corpus.json("example_counter.json"))?;
    let verdict = crate::irregularity::criterion_check(&input.module, &IrregOptions::default())?;
    let good = verdict.verdict == Verdict::GoodAfterPullback;
    let top = verdict.top.function == lin(10, 10);
    let end_linear = verdict.end_top.linearity.linear;
    let oracle_agrees = r["oracle"]["end_partials_agree"] == Value::Bool(true);
    let bad = verdict.first_nonlinear_end();
    // the first non-linear partial is affine + max{r1, r2}
    let shape = bad.is_some_and(|s| affine_offset(&s.function, &max_r1_r2()).is_some());
    let claim = &r["claims"][0];
    let flagged = claim["computed_index"].as_u64().map(|i| i as usize) == bad.map(|s| s.index)
        && claim["discrepancy"] == Value::Bool(claim["index_agrees"] != Value::Bool(true) || claim["value_agrees"] != Value::Bool(true));
    let ok = good && top && end_linear && oracle_agrees && shape && flagged;
    let mut detail = format!(
        "verdict {}, F_4 = {}, F_16(End) = {}, oracle {}, first non-linear F_{}(End) = {}; reference value {} at index {} (discrepancy {})",
        verdict.verdict.name(),
        verdict.top.function,
        verdict.end_top.function,
        if oracle_agrees { "agrees" } else { "DISAGREES" },
        bad.map(|s| s.index).unwrap_or(0),
        bad.map(|s| s.function.to_string()).unwrap_or_default(),
        claim["claim"]["value"].as_str().unwrap_or("?"),
        claim["claim"]["index"],
        claim["discrepancy"],
    );
    if !ok {
        detail.push_str(&format!(
            "; checks: verdict={good} top={top} end_linear={end_linear} oracle={oracle_agrees} shape={shape} flagged={flagged}"
        ));
    }
    Ok((ok, detail))
}

fn random_weight(rng: &mut ChaCha8Rng, interior_x: bool) -> [Rat; 2] {
    let lo = if interior_x { 1 } else { 0 };
    [ratq(rng.gen_range(lo..=12), rng.gen_range(1..=4)), ratq(rng.gen_range(0..=12), rng.gen_range(1..=4))]
}

fn convexity(corpus: &Corpus) -> Result<(bool, String)> {
    let mut modules = vec![crate::report::Input::from_json(corpus.json("example_counter.json"))?.module];
    modules.push(module_from_json(corpus.json("eyx.json"))?);
    modules.extend(corpus.modules("cross.json", "modules")?);
    modules.extend(corpus.modules("turning.json", "modules")?);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut functions, mut failures) = (0, Vec::new());
    for m in &modules {
        let over_r21 = m.base().kind == BaseKind::R21;
        let prof = irregularity_profile(m, &IrregOptions::default())?;
        for (i, f) in prof.partials.iter().enumerate() {
            functions += 1;
            for _ in 0..100 {
                let (a, b) = (random_weight(&mut rng, over_r21), random_weight(&mut rng, over_r21));
                if !midpoint_convex(f, &a, &b) {
                    failures.push(format!("{} F_{} not midpoint-convex", m.name(), i + 1));
                    break;
                }
            }
            if over_r21 {
                for _ in 0..50 {
                    let r = random_weight(&mut rng, true);
                    let up = [r[0].clone(), &r[1] + ratq(rng.gen_range(1..=8), rng.gen_range(1..=3))];
                    if f.eval(&up) > f.eval(&r) {
                        failures.push(format!("{} F_{} increases in r2", m.name(), i + 1));
                        break;
                    }
                }
            }
        }
    }
    let mut detail = format!("{functions} functions on {} modules", modules.len());
    if !failures.is_empty() {
        detail.push_str(&format!("; {}", failures.join(", ")));
    }
    Ok((failures.is_empty(), detail))
}

fn subharmonicity(corpus: &Corpus) -> Result<(bool, String)> {
    let opts = SkeletonOptions::default();
    let modules = corpus.modules("turning.json", "modules")?;
    let (mut joints, mut held, mut bad) = (0, 0, Vec::new());
    for m in &modules {
        let f = MisFunction::irregularity(m)?;
        let sk = skeleton(&f, &opts)?;
        for b in check_skeleton_joints(&f, &sk, &opts)? {
            joints += 1;
            if b.holds() {
                held += 1;
            } else {
                bad.push(format!("{} at {}", m.name(), b.point));
            }
        }
    }
    let mut detail = format!("{held}/{joints} joints balanced over {} modules", modules.len());
    if !bad.is_empty() {
        detail.push_str(&format!("; fails {}", bad.join(", ")));
    }
    Ok((joints > 0 && held == joints, detail))
}

fn turning_point(corpus: &Corpus) -> Result<(bool, String)> {
    let m = module_from_json(corpus.json("eyx.json"))?;
    let opts = SkeletonOptions::default();
    let sk = skeleton(&MisFunction::irregularity(&m)?, &opts)?;
    let extremity = DiscPoint::new(PuiseuxPoly::zero().with_arity(1), rat(1))?;
    let ex = sk.extremities();
    let segment = sk.nodes.len() == 2
        && sk.nodes[0].role == Role::Head
        && sk.nodes[0].point == DiscPoint::gauss()
        && ex.len() == 1
        && ex[0].point == extremity
        && sk.edges.len() == 1
        && sk.edges[0].pieces.first().is_some_and(|p| p.t0.is_zero())
        && sk.edges[0].pieces.last().is_some_and(|p| p.t1 == rat(1));
    let plan = blowup_plan(&m, &opts)?;
    let one_blowup = plan.steps.len() == 1 && plan.point_blowup_count() == Some(1);
    let charts = origin_blowup_verdicts(&m, &IrregOptions::default())?;
    let good = charts.len() == 2 && charts.iter().all(|c| c.verdict.verdict == Verdict::GoodAfterPullback);
    let detail = format!(
        "skeleton {} with extremity {}; plan: {} step(s), {:?} point blowup(s); charts: {}",
        if segment { "is the segment q in [0, 1]" } else { "is NOT the expected segment" },
        ex.first().map(|n| n.point.to_string()).unwrap_or_default(),
        plan.steps.len(),
        plan.point_blowup_count(),
        charts.iter().map(|c| format!("{} {}", c.chart, c.verdict.verdict.name())).collect::<Vec<_>>().join(", "),
    );
    Ok((segment && one_blowup && good, detail))
}

fn determinism(corpus: &Corpus) -> Result<(bool, String)> {
    let o = AnalysisOptions::default();
    let runs = |cmd, name: &str| -> Vec<String> {
        (0..3).map(|_| Report::run(cmd, name, corpus.text(name), &o).render_json()).collect()
    };
    let c9 = runs(Command::Criterion, "example_counter.json");
    let c12 = runs(Command::Plan, "eyx.json");
    let same = |v: &[String]| v.windows(2).all(|w| w[0] == w[1]);
    // verdicts do not depend on the seed of the cyclic-vector search
    let verdicts: Vec<String> = [0u64, 1, 7]
        .iter()
        .map(|&seed| {
            let o = AnalysisOptions { seed, ..AnalysisOptions::default() };
            let v = Report::run(Command::Criterion, "example_counter.json", corpus.text("example_counter.json"), &o).to_json();
            format!("{}", v["result"]["verdict"])
        })
        .collect();
    let seeds_agree = verdicts.windows(2).all(|w| w[0] == w[1]);
    let ok = same(&c9) && same(&c12) && seeds_agree && !c9[0].contains("\"error\"") && !c12[0].contains("\"error\"");
    Ok((
        ok,
        format!(
            "criterion report {} bytes x3 {}, plan report {} bytes x3 {}, verdict under seeds 0/1/7 {}",
            c9[0].len(),
            if same(&c9) { "identical" } else { "DIFFER" },
            c12[0].len(),
            if same(&c12) { "identical" } else { "DIFFER" },
            if seeds_agree { "identical" } else { "DIFFERS" },
        ),
    ))
}
