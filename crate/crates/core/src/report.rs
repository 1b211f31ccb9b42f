//! Deterministic analysis reports.
//!
//! A report echoes the command, the options and a SHA-256 of the input, names
//! the tool version, and carries either the result of the analysis or a
//! structured error with module/operation provenance.  Nothing time- or
//! address-dependent goes in: JSON objects are key-sorted, rationals are
//! `"p/q"` strings, so a fixed `(input, options)` always renders to the same
//! bytes.

use num_traits::Zero;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::diffmod::{module_from_json, BaseKind, DiffModule};
use crate::error::{Error, Result};
use crate::hlt::{hlt_decompose, is_regular, HltOptions};
use crate::irregularity::{criterion_check, irregularity_profile, profile_of_exponentials, CriterionVerdict, IrregOptions};
use crate::series::{fmt_rat, parse_rat, rat, PuiseuxPoly, Rat};
use crate::tropical::{AffineFunctional, PLFunction};
use crate::valtree::{
    blowup_plan, check_skeleton_joints, origin_blowup_verdicts, skeleton, MisFunction, SkeletonOptions, Valuation,
};

/// Version tag of the report layout (see `crates/cli/schemas/report.schema.json`).
pub const REPORT_SCHEMA: &str = "goodform-report/1";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// An error together with where it was raised.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub error: Error,
    /// Library module (`"hlt"`, `"valtree"`, ...) or `"input"`.
    pub module: &'static str,
    pub operation: &'static str,
}

impl Failure {
    pub fn new(error: Error, module: &'static str, operation: &'static str) -> Self {
        Failure { error, module, operation }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.error.kind(),
            "message": self.error.to_string(),
            "module": self.module,
            "operation": self.operation,
        })
    }

    /// 2 for malformed input, 1 for a mathematical failure.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_input_error() {
            2
        } else {
            1
        }
    }
}

trait At<T> {
    fn at(self, module: &'static str, operation: &'static str) -> std::result::Result<T, Failure>;
}

impl<T> At<T> for Result<T> {
    fn at(self, module: &'static str, operation: &'static str) -> std::result::Result<T, Failure> {
        self.map_err(|e| Failure::new(e, module, operation))
    }
}

/// Analyses a report can carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckFlat,
    Hlt,
    Irregularity,
    Criterion,
    Skeleton,
    Plan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckFlat => "check-flat",
            Command::Hlt => "hlt",
            Command::Irregularity => "irregularity",
            Command::Criterion => "criterion",
            Command::Skeleton => "skeleton",
            Command::Plan => "plan",
        }
    }
}

/// Numerical knobs shared by all commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Target precision of one-variable series computations.
    pub precision: i64,
    pub h_max: u32,
    /// Largest radius parameter explored by skeleton searches.
    pub q_max: u32,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { precision: 16, h_max: 12, q_max: 64, seed: 0 }
    }
}

impl AnalysisOptions {
    pub const MAX_PRECISION: i64 = 256;
    pub const MAX_H: u32 = 64;
    pub const MAX_Q: u32 = 4096;

    pub fn validate(&self) -> Result<()> {
        if !(1..=Self::MAX_PRECISION).contains(&self.precision) {
            return Err(Error::Input(format!("precision must lie in 1..={}", Self::MAX_PRECISION)));
        }
        if !(1..=Self::MAX_H).contains(&self.h_max) {
            return Err(Error::Input(format!("h-max must lie in 1..={}", Self::MAX_H)));
        }
        if !(1..=Self::MAX_Q).contains(&self.q_max) {
            return Err(Error::Input(format!("q-max must lie in 1..={}", Self::MAX_Q)));
        }
        Ok(())
    }

    pub fn hlt(&self) -> HltOptions {
        HltOptions { precision: self.precision, h_max: self.h_max, seed: self.seed }
    }

    pub fn irreg(&self) -> IrregOptions {
        IrregOptions { seed: self.seed, ..IrregOptions::default() }
    }

    pub fn skeleton(&self) -> SkeletonOptions {
        SkeletonOptions { q_max: rat(self.q_max as i64), seed: self.seed, ..SkeletonOptions::default() }
    }

    pub fn to_json(&self) -> Value {
        json!({"precision": self.precision, "h_max": self.h_max, "q_max": self.q_max, "seed": self.seed})
    }
}

/// Which partial irregularity a claim is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimKind {
    FirstNonlinearModule,
    FirstNonlinearEnd,
}

impl ClaimKind {
    fn name(self) -> &'static str {
        match self {
            ClaimKind::FirstNonlinearModule => "first_nonlinear_module",
            ClaimKind::FirstNonlinearEnd => "first_nonlinear_end",
        }
    }
}

/// An externally stated value to be compared with the computation.
#[derive(Clone, Debug, PartialEq)]
pub struct Claim {
    pub kind: ClaimKind,
    pub index: usize,
    pub value: PLFunction,
    /// Human-readable form, echoed verbatim.
    pub text: Option<String>,
    pub source: Option<String>,
}

fn functional_from_json(v: &Value) -> Result<AffineFunctional> {
    let field = |k: &str| -> Result<Rat> {
        match v.get(k) {
            Some(Value::String(s)) => parse_rat(s),
            None if k == "c" => Ok(Rat::zero()),
            _ => Err(Error::Parse(format!("functional field `{k}` must be a \"p/q\" string"))),
        }
    };
    if let Some(obj) = v.as_object() {
        if let Some(k) = obj.keys().find(|k| !["a1", "a2", "c"].contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown functional field `{k}`")));
        }
    }
    Ok(AffineFunctional::new(field("a1")?, field("a2")?, field("c")?))
}

impl Claim {
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("a claim must be an object".into()))?;
        if let Some(k) = obj.keys().find(|k| !["kind", "index", "value", "text", "source"].contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown claim field `{k}`")));
        }
        let kind = match obj.get("kind").and_then(Value::as_str) {
            Some("first_nonlinear_end") => ClaimKind::FirstNonlinearEnd,
            Some("first_nonlinear_module") => ClaimKind::FirstNonlinearModule,
            other => return Err(Error::Input(format!("unknown claim kind {other:?}"))),
        };
        let index = obj
            .get("index")
            .and_then(Value::as_u64)
            .filter(|&i| i >= 1)
            .ok_or_else(|| Error::Parse("claim `index` must be a positive integer".into()))? as usize;
        let fs = obj
            .get("value")
            .and_then(Value::as_array)
            .filter(|a| !a.is_empty())
            .ok_or_else(|| Error::Parse("claim `value` must be a non-empty list of functionals".into()))?
            .iter()
            .map(functional_from_json)
            .collect::<Result<Vec<_>>>()?;
        let text = obj.get("text").and_then(Value::as_str).map(String::from);
        let source = obj.get("source").and_then(Value::as_str).map(String::from);
        Ok(Claim { kind, index, value: PLFunction::new(fs).canonicalize(), text, source })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.name(),
            "index": self.index,
            "value": self.value.to_string(),
            "text": self.text,
            "source": self.source,
        })
    }
}

/// `L` with `f = g + L`, when `f - g` is affine.
pub fn affine_offset(f: &PLFunction, g: &PLFunction) -> Option<AffineFunctional> {
    let (f, g) = (f.canonicalize(), g.canonicalize());
    let f0 = &f.functionals()[0];
    g.functionals().iter().find_map(|gk| {
        let l = f0.add(&gk.scale(&rat(-1)));
        (g.combine_sum(&PLFunction::new(vec![l.clone()])) == f).then_some(l)
    })
}

fn check_claim(claim: &Claim, v: &CriterionVerdict) -> Value {
    let statuses = match claim.kind {
        ClaimKind::FirstNonlinearModule => &v.module_statuses,
        ClaimKind::FirstNonlinearEnd => &v.end_statuses,
    };
    let computed = statuses.iter().find(|s| !s.linearity.linear);
    let found_at: Vec<usize> = statuses.iter().filter(|s| s.function == claim.value).map(|s| s.index).collect();
    let index_agrees = computed.is_some_and(|s| s.index == claim.index);
    let value_agrees = computed.is_some_and(|s| s.function == claim.value);
    let offset = computed.and_then(|s| affine_offset(&s.function, &claim.value));
    json!({
        "claim": claim.to_json(),
        "computed_index": computed.map(|s| s.index),
        "computed_value": computed.map(|s| s.function.to_string()),
        "index_agrees": index_agrees,
        "value_agrees": value_agrees,
        "same_shape_up_to_affine": offset.is_some(),
        "affine_offset": offset.map(|l| l.to_string()),
        "claimed_value_occurs_at": found_at,
        "discrepancy": !(index_agrees && value_agrees),
    })
}

/// Parsed input: a module and optional claims about it.
#[derive(Clone, Debug)]
pub struct Input {
    pub module: DiffModule,
    pub claims: Vec<Claim>,
}

impl Input {
    /// Accepts either a bare module object or `{"module": ..., "claims": [...]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("input must be a JSON object".into()))?;
        if !obj.contains_key("module") {
            return Ok(Input { module: module_from_json(v)?, claims: Vec::new() });
        }
        if let Some(k) = obj.keys().find(|k| !["module", "claims"].contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown input field `{k}`")));
        }
        let module = module_from_json(&obj["module"])?;
        let claims = match obj.get("claims") {
            None => Vec::new(),
            Some(Value::Array(a)) => a.iter().map(Claim::from_json).collect::<Result<_>>()?,
            Some(_) => return Err(Error::Parse("`claims` must be a list".into())),
        };
        Ok(Input { module, claims })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("input is not JSON: {e}")))?;
        Self::from_json(&v)
    }
}

/// Polar part `phi` with `M = E(phi)` (up to a constant regular twist), for
/// rank-1 modules over `R21`/`R22`, read off by integrating the connection.
pub fn exponential_of_rank_one(m: &DiffModule) -> Option<PuiseuxPoly> {
    if m.rank() != 1 || m.base().kind == BaseKind::Kz {
        return None;
    }
    let mut phi = PuiseuxPoly::zero().with_arity(2);
    for (i, mat) in m.matrices().iter().enumerate() {
        for (ex, c) in mat[0][0].terms() {
            let e = &ex[i] + rat(1);
            if e.is_zero() {
                continue; // regular part
            }
            // terms already produced by the first derivation
            if i == 1 && !ex[0].is_zero() {
                continue;
            }
            let mut x = ex.clone();
            x[i] = e.clone();
            phi = &phi + &PuiseuxPoly::monomial(2, x, c / e);
        }
    }
    let phi = phi.with_poles(m.base().kind.poles());
    let back = DiffModule::e_phi(&phi, m.base()).ok()?;
    // the candidate must reproduce the connection up to constant terms
    let strip = |p: &PuiseuxPoly| {
        let terms: Vec<String> = p
            .terms()
            .filter(|(ex, _)| !(ex[0].is_zero() && ex[1].is_zero()))
            .map(|(ex, c)| format!("{}:{}:{}", fmt_rat(&ex[0]), fmt_rat(&ex[1]), fmt_rat(c)))
            .collect();
        terms.join(",")
    };
    let same = m.matrices().iter().zip(back.matrices()).all(|(a, b)| strip(&a[0][0]) == strip(&b[0][0]));
    same.then_some(phi)
}

/// Brute-force profile of `End M` for a direct sum of rank-1 modules: the
/// capped Gauss norms of all pairwise differences of the exponents.
fn exponential_oracle(m: &DiffModule, v: &CriterionVerdict, opts: &IrregOptions) -> Result<Value> {
    let blocks = m.blocks();
    let phis: Option<Vec<PuiseuxPoly>> = blocks.iter().map(|(_, b)| exponential_of_rank_one(b)).collect();
    let Some(phis) = phis else {
        return Ok(json!({"available": false}));
    };
    let diffs: Vec<PuiseuxPoly> = phis.iter().flat_map(|a| phis.iter().map(move |b| a - b)).collect();
    let oracle = profile_of_exponentials(&diffs, &opts.budget)?;
    let agrees = oracle.len() == v.end_statuses.len()
        && oracle.iter().zip(&v.end_statuses).all(|(o, s)| *o == s.function);
    let first = oracle.iter().position(|f| !f.is_linear_on_cone().linear);
    Ok(json!({
        "available": true,
        "exponentials": phis.iter().map(|p| p.to_string_with(&["x", "y"])).collect::<Vec<_>>(),
        "end_partials_agree": agrees,
        "first_nonlinear_index": first.map(|i| i + 1),
        "first_nonlinear_value": first.map(|i| oracle[i].to_string()),
        "end_partials": oracle.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    }))
}

fn check_flat_result(m: &DiffModule) -> Value {
    json!({
        "flat": m.check_flat(),
        "base": m.base().kind.name(),
        "h": m.base().h,
        "rank": m.rank(),
        "label": m.name(),
    })
}

fn hlt_result(m: &DiffModule, o: &AnalysisOptions) -> std::result::Result<Value, Failure> {
    let reg = is_regular(m, &o.hlt()).at("hlt", "is_regular")?;
    let parts = hlt_decompose(m, &o.hlt()).at("hlt", "hlt_decompose")?;
    Ok(json!({
        "rank": m.rank(),
        "regular": reg.regular,
        "summands": parts.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
    }))
}

fn require_surface(m: &DiffModule, operation: &'static str) -> std::result::Result<(), Failure> {
    if m.base().kind == BaseKind::Kz {
        return Err(Failure::new(
            Error::Input(format!("`{operation}` needs a module over R21 or R22")),
            "input",
            operation,
        ));
    }
    Ok(())
}

fn irregularity_result(m: &DiffModule, o: &AnalysisOptions) -> std::result::Result<Value, Failure> {
    require_surface(m, "irregularity_profile")?;
    let prof = irregularity_profile(m, &o.irreg()).at("irregularity", "irregularity_profile")?;
    Ok(prof.to_json())
}

fn criterion_result(m: &DiffModule, claims: &[Claim], o: &AnalysisOptions) -> std::result::Result<Value, Failure> {
    require_surface(m, "criterion_check")?;
    let v = criterion_check(m, &o.irreg()).at("irregularity", "criterion_check")?;
    let oracle = exponential_oracle(m, &v, &o.irreg()).at("irregularity", "profile_of_exponentials")?;
    let mut out = v.to_json();
    out["oracle"] = oracle;
    out["claims"] = json!(claims.iter().map(|c| check_claim(c, &v)).collect::<Vec<_>>());
    Ok(out)
}

fn skeleton_result(m: &DiffModule, o: &AnalysisOptions) -> std::result::Result<Value, Failure> {
    let f = MisFunction::irregularity(m).at("valtree", "skeleton")?;
    let so = o.skeleton();
    let sk = skeleton(&f, &so).at("valtree", "skeleton")?;
    let balances = check_skeleton_joints(&f, &sk, &so).at("valtree", "subharmonic_check")?;
    let mut out = sk.to_json();
    out["joint_balances"] = json!(balances.iter().map(|b| b.to_json()).collect::<Vec<_>>());
    out["subharmonic"] = json!(balances.iter().all(|b| b.holds()));
    Ok(out)
}

fn plan_result(m: &DiffModule, o: &AnalysisOptions) -> std::result::Result<Value, Failure> {
    require_surface(m, "blowup_plan")?;
    let plan = blowup_plan(m, &o.skeleton()).at("valtree", "blowup_plan")?;
    let mut out = plan.to_json();
    // The two crossing points can be checked directly when the plan is the
    // blowup of the origin.
    let origin_only = plan.steps.len() == 1
        && matches!(&plan.steps[0].valuation, Valuation::Divisorial(p) if p.center().is_zero() && *p.q() == rat(1));
    out["charts"] = if origin_only {
        let vs = origin_blowup_verdicts(m, &o.irreg()).at("valtree", "origin_blowup_verdicts")?;
        json!(vs.iter().map(|c| c.to_json()).collect::<Vec<_>>())
    } else {
        Value::Null
    };
    Ok(out)
}

/// Runs one analysis on a parsed input.
pub fn analyze(cmd: Command, input: &Input, o: &AnalysisOptions) -> std::result::Result<Value, Failure> {
    o.validate().at("input", "options")?;
    let m = &input.module;
    match cmd {
        Command::CheckFlat => Ok(check_flat_result(m)),
        Command::Hlt => hlt_result(m, o),
        Command::Irregularity => irregularity_result(m, o),
        Command::Criterion => criterion_result(m, &input.claims, o),
        Command::Skeleton => skeleton_result(m, o),
        Command::Plan => plan_result(m, o),
    }
}

/// A finished report.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    /// `{"name": ..., "sha256": ...}` of the input, when there is one.
    pub input: Value,
    pub options: Value,
    pub outcome: std::result::Result<Value, Failure>,
}

impl Report {
    /// Parses `text`, runs `cmd`, and wraps everything up.
    pub fn run(cmd: Command, input_name: &str, text: &str, o: &AnalysisOptions) -> Report {
        let outcome = Input::parse(text).at("input", "parse").and_then(|inp| analyze(cmd, &inp, o));
        Report {
            command: cmd.name().to_string(),
            input: json!({"name": input_name, "sha256": sha256_hex(text.as_bytes())}),
            options: o.to_json(),
            outcome,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            Ok(_) => 0,
            Err(f) => f.exit_code(),
        }
    }

    pub fn status(&self) -> &'static str {
        match &self.outcome {
            Ok(_) => "ok",
            Err(f) if f.error.is_input_error() => "input_error",
            Err(_) => "math_failure",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = Map::new();
        v.insert("schema".into(), json!(REPORT_SCHEMA));
        v.insert("tool".into(), json!({"name": "goodform", "version": TOOL_VERSION}));
        v.insert("command".into(), json!(self.command));
        v.insert("input".into(), self.input.clone());
        v.insert("options".into(), self.options.clone());
        v.insert("status".into(), json!(self.status()));
        match &self.outcome {
            Ok(r) => v.insert("result".into(), r.clone()),
            Err(f) => v.insert("error".into(), f.to_json()),
        };
        Value::Object(v)
    }

    /// Pretty JSON with a trailing newline.
    pub fn render_json(&self) -> String {
        render_json(&self.to_json())
    }

    /// Line-oriented `path = value` rendering of the same data.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        flatten(&self.to_json(), "", &mut out);
        out
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn flatten(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(x, &p, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten(x, &format!("{path}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{path} = {s}\n")),
        other => out.push_str(&format!("{path} = {other}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmod::{module_to_json, BaseRing};
    use crate::series::parse_poly;

    fn e(kind: BaseKind, phi: &str) -> DiffModule {
        DiffModule::e_phi(&parse_poly(phi, &["x", "y"]).unwrap(), BaseRing::new(kind, 1)).unwrap()
    }

    #[test]
    fn hashes_are_hex_sha256() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn exponential_recovered_from_connection() {
        for phi in ["x^-3*y^-3 + x^-1", "y^-2", "y*x^-1 + x^-2*y^3"] {
            let m = e(BaseKind::R22, phi);
            assert_eq!(exponential_of_rank_one(&m).unwrap(), parse_poly(phi, &["x", "y"]).unwrap().with_poles([true, true]));
        }
        let twisted = DiffModule::trivial(BaseRing::new(BaseKind::R22, 1), 2);
        assert!(exponential_of_rank_one(&twisted).is_none());
    }

    #[test]
    fn affine_offsets() {
        let f = PLFunction::new(vec![
            AffineFunctional::linear(rat(25), rat(24)),
            AffineFunctional::linear(rat(24), rat(25)),
        ]);
        let g = PLFunction::new(vec![AffineFunctional::linear(rat(4), rat(3)), AffineFunctional::linear(rat(3), rat(4))]);
        assert_eq!(affine_offset(&f, &g), Some(AffineFunctional::linear(rat(21), rat(21))));
        assert_eq!(affine_offset(&f, &PLFunction::zero()), None);
    }

    #[test]
    fn reports_are_stable_and_sorted() {
        let text = serde_json::to_string(&module_to_json(&e(BaseKind::R21, "y*x^-1"))).unwrap();
        let a = Report::run(Command::Criterion, "m.json", &text, &AnalysisOptions::default()).render_json();
        let b = Report::run(Command::Criterion, "m.json", &text, &AnalysisOptions::default()).render_json();
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["status"], "ok");
        assert_eq!(v["result"]["verdict"], "Fails");
        assert!(a.find("\"command\"").unwrap() < a.find("\"input\"").unwrap());
    }

    #[test]
    fn errors_carry_provenance() {
        let r = Report::run(Command::Hlt, "bad.json", "{\"base\": \"R9\"}", &AnalysisOptions::default());
        assert_eq!(r.exit_code(), 2);
        let v = r.to_json();
        assert_eq!(v["error"]["module"], "input");
        assert_eq!(v["error"]["operation"], "parse");

        let text = serde_json::to_string(&module_to_json(&e(BaseKind::R21, "y^2*x^-3 - 2*x^-1"))).unwrap();
        let r = Report::run(Command::Skeleton, "m.json", &text, &AnalysisOptions::default());
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.to_json()["error"]["kind"], "extension_required");
        assert_eq!(r.to_json()["error"]["module"], "valtree");
    }

    #[test]
    fn options_are_range_checked() {
        let o = AnalysisOptions { precision: 300, ..AnalysisOptions::default() };
        let text = serde_json::to_string(&module_to_json(&e(BaseKind::R21, "x^-1"))).unwrap();
        assert_eq!(Report::run(Command::CheckFlat, "m.json", &text, &o).exit_code(), 2);
    }
}
