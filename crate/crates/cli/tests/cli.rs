use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_goodform"));
    c.env_remove("GOODFORM_CORPUS");
    c
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus")
}

fn corpus(name: &str) -> PathBuf {
    corpus_dir().join(name)
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn validator(name: &str) -> jsonschema::Validator {
    let module = jsonschema::Resource::from_contents(schema("module.schema.json")).unwrap();
    jsonschema::options().with_resource("urn:goodform:module", module).build(&schema(name)).unwrap()
}

fn assert_valid(schema_name: &str, v: &Value) {
    let val = validator(schema_name);
    let errors: Vec<String> = val.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}");
}

fn run(args: &[&str]) -> (Output, Value) {
    let out = bin().args(args).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out, v)
}

fn scratch(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("goodform-cli-tests");
    fs::create_dir_all(&d).unwrap();
    d.join(name)
}

#[test]
fn criterion_on_four_summand_example() {
    let (out, v) = run(&["criterion", corpus("example_counter.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid("report.schema.json", &v);
    let r = &v["result"];
    assert_eq!(r["verdict"], "GoodAfterPullback");
    assert_eq!(r["top"]["function"], "10*r1 + 10*r2");
    assert_eq!(r["end_top"]["linear"], true);
    assert_eq!(r["first_nonlinear_end"]["index"], 9);
    assert!(!r["first_nonlinear_end"]["witnesses"].as_array().unwrap().is_empty());
    assert_eq!(r["oracle"]["end_partials_agree"], true);
    let claim = &r["claims"][0];
    assert_eq!(claim["discrepancy"], true);
    assert_eq!(claim["index_agrees"], false);
    assert_eq!(claim["same_shape_up_to_affine"], true);
}

#[test]
fn hlt_of_single_exponential() {
    let (out, v) = run(&["hlt", corpus("ez2.json").to_str().unwrap(), "--precision", "16"]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid("report.schema.json", &v);
    let s = v["result"]["summands"].as_array().unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0]["phi"], "z^-2");
    assert_eq!(s[0]["exponents"], serde_json::json!(["0"]));
}

#[test]
fn skeleton_and_plan_of_turning_point() {
    let (out, v) = run(&["skeleton", corpus("eyx.json").to_str().unwrap(), "--q-max", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid("report.schema.json", &v);
    let ext: Vec<&Value> =
        v["result"]["nodes"].as_array().unwrap().iter().filter(|n| n["role"] == "extremity").collect();
    assert_eq!(ext.len(), 1);
    assert_eq!(ext[0]["center"], "0");
    assert_eq!(ext[0]["q"], "1");

    let (out, v) = run(&["plan", corpus("eyx.json").to_str().unwrap(), "--q-max", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid("report.schema.json", &v);
    assert_eq!(v["result"]["point_blowups"], 1);
    let charts = v["result"]["charts"].as_array().unwrap();
    assert_eq!(charts.len(), 2);
    assert!(charts.iter().all(|c| c["criterion"]["verdict"] == "GoodAfterPullback"));
}

#[test]
fn every_command_report_validates() {
    for (cmd, file) in [
        ("check-flat", "example_counter.json"),
        ("irregularity", "example_counter.json"),
        ("irregularity", "eyx.json"),
        ("hlt", "eyx.json"),
        ("check-flat", "ez2.json"),
    ] {
        let (out, v) = run(&[cmd, corpus(file).to_str().unwrap()]);
        assert_valid("report.schema.json", &v);
        let code = out.status.code().unwrap();
        assert_eq!(code != 0, v["status"] != "ok", "{cmd} {file}");
    }
}

#[test]
fn corpus_inputs_match_input_schema() {
    for f in ["example_counter.json", "eyx.json", "ez2.json"] {
        let v: Value = serde_json::from_str(&fs::read_to_string(corpus(f)).unwrap()).unwrap();
        assert_valid("input.schema.json", &v);
    }
}

#[test]
fn reports_are_byte_identical() {
    let a = bin().args(["criterion", corpus("example_counter.json").to_str().unwrap()]).output().unwrap();
    let b = bin().args(["criterion", corpus("example_counter.json").to_str().unwrap()]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn malformed_input_exits_with_two() {
    let p = scratch("malformed.json");
    fs::write(&p, "{\"base\": \"R21\", \"rank\": 1, \"matrices\": {\"d1\": [[\"x^-\"]]}").unwrap();
    let (out, v) = run(&["criterion", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["status"], "input_error");
    assert_eq!(v["error"]["module"], "input");
    assert_valid("report.schema.json", &v);

    let (out, v) = run(&["hlt", "/nonexistent/module.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["error"]["operation"], "read");
}

#[test]
fn out_of_range_options_exit_with_two() {
    let (out, _) = run(&["hlt", corpus("ez2.json").to_str().unwrap(), "--precision", "257"]);
    assert_eq!(out.status.code(), Some(2));
    let (out, _) = run(&["hlt", corpus("ez2.json").to_str().unwrap(), "--h-max", "65"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extension_required_is_a_math_failure() {
    let p = scratch("irrational_branch.json");
    let m = serde_json::json!({
        "base": "R21", "rank": 1,
        "matrices": {"d1": [["-3*y^2*x^-4 + 2*x^-2"]], "d2": [["2*y*x^-3"]]},
    });
    fs::write(&p, m.to_string()).unwrap();
    let (out, v) = run(&["skeleton", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(v["status"], "math_failure");
    assert_eq!(v["error"]["kind"], "extension_required");
    assert_eq!(v["error"]["module"], "valtree");
    assert_valid("report.schema.json", &v);
}

#[test]
fn output_file_and_text_format() {
    let p = scratch("report.txt");
    let out = bin()
        .args(["check-flat", corpus("eyx.json").to_str().unwrap(), "--format", "text", "--output", p.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&p).unwrap();
    assert!(text.lines().any(|l| l == "result.flat = true"), "{text}");
}

#[test]
fn selftest_passes_on_bundled_corpus() {
    let (out, v) = run(&["selftest", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_valid("report.schema.json", &v);
    let crit = v["criteria"].as_array().unwrap();
    assert_eq!(crit.len(), 14);
    assert!(crit.iter().all(|c| c["passed"] == true || !c["known_failure"].is_null()));
}

#[test]
fn selftest_on_corrupted_corpus_is_an_input_error() {
    let dir = scratch("corrupted-corpus");
    fs::create_dir_all(&dir).unwrap();
    for e in fs::read_dir(corpus_dir()).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), dir.join(e.file_name())).unwrap();
    }
    // the copied corpus is accepted as is
    let out = bin().args(["selftest"]).env("GOODFORM_CORPUS", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    fs::write(dir.join("turning.json"), "{\"modules\": [{\"base\": \"R21\", \"exponentials\": [{\"phi\": \"y^-1\"}]}]}").unwrap();
    let out = bin().args(["selftest"]).env("GOODFORM_CORPUS", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "input_error");
    fs::write(dir.join("eyx.json"), "{ not json").unwrap();
    let out = bin().args(["selftest", "--corpus", dir.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
