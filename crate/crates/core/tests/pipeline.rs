//! End-to-end use of the public API: JSON in, analyses, reports out.

use goodform::corpus::{build_module, Corpus};
use goodform::diffmod::{module_from_json, module_to_json, BaseKind, BaseRing, DiffModule};
use goodform::irregularity::{criterion_check, irregularity_profile, IrregOptions, Verdict};
use goodform::report::{AnalysisOptions, Command, Input, Report};
use goodform::series::{parse_poly, rat};
use goodform::valtree::{blowup_plan, skeleton, MisFunction, SkeletonOptions};
use proptest::prelude::*;
use serde_json::{json, Value};

fn e(kind: BaseKind, phi: &str) -> DiffModule {
    let names = kind.var_names();
    DiffModule::e_phi(&parse_poly(phi, names).unwrap(), BaseRing::new(kind, 1)).unwrap()
}

#[test]
fn json_round_trip_preserves_analyses() {
    let m = build_module(&json!({"base": "R22", "exponentials": [{"phi": "x^-1"}, {"phi": "y^-2"}], "mix": [[0, 1, "x + y"]]}))
        .unwrap();
    let back = module_from_json(&module_to_json(&m)).unwrap();
    assert_eq!(back, m);
    let a = irregularity_profile(&m, &IrregOptions::default()).unwrap();
    let b = irregularity_profile(&back, &IrregOptions::default()).unwrap();
    assert_eq!(a.partials, b.partials);
}

#[test]
fn counterexample_report_from_corpus_text() {
    let c = Corpus::builtin();
    let r = Report::run(Command::Criterion, "example_counter.json", c.text("example_counter.json"), &AnalysisOptions::default());
    assert_eq!(r.exit_code(), 0);
    let v = r.to_json();
    assert_eq!(v["result"]["verdict"], "GoodAfterPullback");
    assert_eq!(v["result"]["claims"][0]["computed_index"], 9);
    assert_eq!(v["result"]["claims"][0]["claim"]["index"], 5);
    // every number in the result is an integer or a "p/q" string
    fn no_floats(v: &Value) -> bool {
        match v {
            Value::Number(n) => n.is_i64() || n.is_u64(),
            Value::Array(a) => a.iter().all(no_floats),
            Value::Object(o) => o.values().all(no_floats),
            _ => true,
        }
    }
    assert!(no_floats(&v));
}

#[test]
fn bare_module_and_envelope_inputs_agree() {
    let c = Corpus::builtin();
    let env = Input::from_json(c.json("example_counter.json")).unwrap();
    let bare = Input::from_json(&module_to_json(&env.module)).unwrap();
    assert!(bare.claims.is_empty());
    assert_eq!(bare.module, env.module);
    assert!(Input::from_json(&json!({"module": module_to_json(&env.module), "extra": 1})).is_err());
}

#[test]
fn turning_point_pipeline() {
    let m = e(BaseKind::R21, "y*x^-1");
    assert_eq!(criterion_check(&m, &IrregOptions::default()).unwrap().verdict, Verdict::Fails);
    let sk = skeleton(&MisFunction::irregularity(&m).unwrap(), &SkeletonOptions::default()).unwrap();
    assert_eq!(sk.extremities().len(), 1);
    let plan = blowup_plan(&m, &SkeletonOptions::default()).unwrap();
    assert_eq!(plan.point_blowup_count(), Some(1));
}

#[test]
fn small_q_max_is_reported_as_inconclusive() {
    // the extremity of E(y^2/x^3) sits at q = 3/2
    let m = e(BaseKind::R21, "y^2*x^-3");
    let opts = SkeletonOptions { q_max: rat(1), ..SkeletonOptions::default() };
    let sk = skeleton(&MisFunction::irregularity(&m).unwrap(), &opts).unwrap();
    assert!(!sk.is_conclusive());
    assert!(blowup_plan(&m, &opts).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reports_do_not_depend_on_run(i in -3i64..0, j in 0i64..3, c in 1i64..4) {
        let text = module_to_json(&e(BaseKind::R21, &format!("{c}*x^{i}*y^{j}"))).to_string();
        let o = AnalysisOptions::default();
        let a = Report::run(Command::Irregularity, "m.json", &text, &o).render_json();
        let b = Report::run(Command::Irregularity, "m.json", &text, &o).render_json();
        prop_assert_eq!(a, b);
    }
}
