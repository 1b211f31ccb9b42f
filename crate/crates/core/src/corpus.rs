//! The bundled example corpus used by the self-test.
//!
//! Files are JSON.  Modules are given either in the full format read by
//! [`module_from_json`] or as a construction:
//!
//! ```json
//! {"base": "Kz",
//!  "exponentials": [{"phi": "z^-2", "regular": [["1/3"]]}, {"phi": "z^-1"}],
//!  "mix": [[0, 1, "z"]],
//!  "label": "..."}
//! ```
//!
//! meaning `⊕ E(phi_j) ⊗ R_j` (the regular factor `R_j` is only available over
//! `Kz`), followed by the gauge changes `I + c E_ij` in order.  The whole
//! corpus is compiled into the library; a directory with the same file names
//! can replace it at run time.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::diffmod::{module_from_json, pmat_identity, BaseKind, BaseRing, DiffModule, PMatrix};
use crate::error::{Error, Result};
use crate::series::{parse_poly, PuiseuxPoly};

/// File names making up a complete corpus.
pub const FILES: [&str; 9] = [
    "example_counter.json",
    "eyx.json",
    "ez2.json",
    "scales.json",
    "cross.json",
    "regularity.json",
    "hlt_roundtrip.json",
    "solutions.json",
    "turning.json",
];

const BUILTIN: [(&str, &str); 9] = [
    ("example_counter.json", include_str!("../corpus/example_counter.json")),
    ("eyx.json", include_str!("../corpus/eyx.json")),
    ("ez2.json", include_str!("../corpus/ez2.json")),
    ("scales.json", include_str!("../corpus/scales.json")),
    ("cross.json", include_str!("../corpus/cross.json")),
    ("regularity.json", include_str!("../corpus/regularity.json")),
    ("hlt_roundtrip.json", include_str!("../corpus/hlt_roundtrip.json")),
    ("solutions.json", include_str!("../corpus/solutions.json")),
    ("turning.json", include_str!("../corpus/turning.json")),
];

/// Parsed corpus files, keyed by file name, with their raw text.
#[derive(Clone, Debug)]
pub struct Corpus {
    files: BTreeMap<String, (String, Value)>,
}

fn parse_file(name: &str, text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("corpus file {name}: {e}")))
}

impl Corpus {
    pub fn builtin() -> Self {
        let files = BUILTIN
            .iter()
            .map(|(n, t)| (n.to_string(), (t.to_string(), parse_file(n, t).expect("bundled corpus parses"))))
            .collect();
        Corpus { files }
    }

    /// Loads every corpus file from `dir`; all of them must be present and
    /// well-formed.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut files = BTreeMap::new();
        for name in FILES {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Input(format!("cannot read corpus file {}: {e}", path.display())))?;
            let v = parse_file(name, &text)?;
            files.insert(name.to_string(), (text, v));
        }
        let c = Corpus { files };
        c.validate()?;
        Ok(c)
    }

    /// Builds every module mentioned in the corpus, so malformed entries are
    /// reported before any criterion runs.
    pub fn validate(&self) -> Result<()> {
        for name in ["eyx.json", "ez2.json"] {
            module_from_json(self.json(name))?;
        }
        crate::report::Input::from_json(self.json("example_counter.json"))?;
        for name in ["cross.json", "regularity.json", "solutions.json", "turning.json"] {
            self.modules(name, "modules")?;
        }
        self.modules("solutions.json", "non_prepared")?;
        for case in self.list("hlt_roundtrip.json", "cases")? {
            build_module(field(case, "module")?)?;
        }
        for case in self.list("scales.json", "cases")? {
            scale_case(case)?;
        }
        Ok(())
    }

    pub fn json(&self, name: &str) -> &Value {
        &self.files[name].1
    }

    pub fn text(&self, name: &str) -> &str {
        &self.files[name].0
    }

    pub fn list(&self, name: &str, key: &str) -> Result<&Vec<Value>> {
        self.json(name)
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Input(format!("corpus file {name} lacks a `{key}` list")))
    }

    /// Builds the modules listed under `key` (entries may wrap the module as
    /// `{"module": ...}` next to expected data).
    pub fn modules(&self, name: &str, key: &str) -> Result<Vec<DiffModule>> {
        self.list(name, key)?
            .iter()
            .map(|v| build_module(v.get("module").unwrap_or(v)))
            .collect()
    }
}

pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Input(format!("corpus entry lacks `{key}`")))
}

pub fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| Error::Input(format!("corpus field `{key}` must be a string")))
}

fn poly(s: &str, kind: BaseKind) -> Result<PuiseuxPoly> {
    Ok(parse_poly(s, kind.var_names())?.with_poles(kind.poles()))
}

fn matrix(v: &Value, kind: BaseKind) -> Result<PMatrix> {
    let bad = || Error::Input("matrices must be lists of lists of strings".into());
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|e| poly(e.as_str().ok_or_else(bad)?, kind))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Builds a module from either of the two corpus formats.
pub fn build_module(v: &Value) -> Result<DiffModule> {
    if v.get("matrices").is_some() {
        return module_from_json(v);
    }
    let kind = BaseKind::parse(str_field(v, "base")?)?;
    let base = BaseRing::new(kind, 1);
    let exps = field(v, "exponentials")?.as_array().ok_or_else(|| Error::Input("`exponentials` must be a list".into()))?;
    let mut parts = Vec::new();
    for e in exps {
        let mut m = DiffModule::e_phi(&poly(str_field(e, "phi")?, kind)?, base)?;
        if let Some(r) = e.get("regular") {
            if kind != BaseKind::Kz {
                return Err(Error::Input("regular factors are only supported over Kz".into()));
            }
            m = m.tensor(&DiffModule::new(base, vec![matrix(r, kind)?], None)?)?;
        }
        parts.push(m);
    }
    let mut m = DiffModule::direct_sum_all(&parts)?;
    if let Some(mix) = v.get("mix") {
        let bad = || Error::Input("`mix` entries are [i, j, \"entry\"] with i != j".into());
        for step in mix.as_array().ok_or_else(bad)? {
            let (i, j, c) = match step.as_array().map(|a| a.as_slice()) {
                Some([i, j, c]) => (
                    i.as_u64().ok_or_else(bad)? as usize,
                    j.as_u64().ok_or_else(bad)? as usize,
                    c.as_str().ok_or_else(bad)?,
                ),
                _ => return Err(bad()),
            };
            let d = m.rank();
            if i == j || i >= d || j >= d {
                return Err(bad());
            }
            let c = poly(c, kind)?.with_arity(kind.arity());
            let mut g = pmat_identity(d);
            let mut gi = pmat_identity(d);
            g[i][j] = c.clone();
            gi[i][j] = -&c;
            m = m.gauge(&g, &gi)?;
        }
    }
    let label = match v.get("label").and_then(Value::as_str) {
        Some(l) => l.to_string(),
        None => exps
            .iter()
            .map(|e| format!("E({})", e.get("phi").and_then(Value::as_str).unwrap_or("?")))
            .collect::<Vec<_>>()
            .join(" + "),
    };
    Ok(m.with_label(label))
}

/// `(E(phi), phi)` for an entry `{"base": ..., "phi": ...}`.
pub fn scale_case(v: &Value) -> Result<(DiffModule, PuiseuxPoly)> {
    let kind = BaseKind::parse(str_field(v, "base")?)?;
    let phi = poly(str_field(v, "phi")?, kind)?;
    Ok((DiffModule::e_phi(&phi, BaseRing::new(kind, 1))?, phi))
}

/// A pair of `"p/q"` strings.
pub fn weight(v: &Value) -> Result<[crate::series::Rat; 2]> {
    let bad = || Error::Input("weights are pairs of \"p/q\" strings".into());
    match v.as_array().map(|a| a.as_slice()) {
        Some([a, b]) => Ok([
            crate::series::parse_rat(a.as_str().ok_or_else(bad)?)?,
            crate::series::parse_rat(b.as_str().ok_or_else(bad)?)?,
        ]),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_is_complete_and_valid() {
        let c = Corpus::builtin();
        c.validate().unwrap();
        assert_eq!(c.modules("turning.json", "modules").unwrap().len(), 6);
        assert_eq!(c.modules("regularity.json", "modules").unwrap().len(), 12);
    }

    #[test]
    fn full_and_constructed_formats_agree() {
        let c = Corpus::builtin();
        let built = build_module(&serde_json::json!({"base": "R21", "exponentials": [{"phi": "y*x^-1"}]})).unwrap();
        let file = module_from_json(c.json("eyx.json")).unwrap();
        assert_eq!(built.matrices(), file.matrices());
        let phis = ["x^-3*y^-3", "x^-3*y^-3 + x^-1", "x^-2*y^-2", "x^-2*y^-2 + y^-1"];
        let construction = serde_json::json!({
            "base": "R22",
            "exponentials": phis.iter().map(|p| serde_json::json!({"phi": p})).collect::<Vec<_>>(),
        });
        let counter = crate::report::Input::from_json(c.json("example_counter.json")).unwrap().module;
        assert_eq!(build_module(&construction).unwrap().matrices(), counter.matrices());
        let ez2 = module_from_json(c.json("ez2.json")).unwrap();
        let built = build_module(&serde_json::json!({"base": "Kz", "exponentials": [{"phi": "z^-2"}]})).unwrap();
        assert_eq!(built.matrices(), ez2.matrices());
    }

    #[test]
    fn mixing_is_a_gauge_change() {
        let plain = build_module(&serde_json::json!({"base": "R22", "exponentials": [{"phi": "x^-1"}, {"phi": "y^-1"}]})).unwrap();
        let mixed = build_module(&serde_json::json!({
            "base": "R22", "exponentials": [{"phi": "x^-1"}, {"phi": "y^-1"}], "mix": [[0, 1, "x"]]
        }))
        .unwrap();
        assert_ne!(plain.matrices(), mixed.matrices());
        assert!(mixed.check_flat());
        assert!(build_module(&serde_json::json!({"base": "R22", "exponentials": [{"phi": "x^-1"}], "mix": [[0, 0, "x"]]})).is_err());
    }

    #[test]
    fn missing_directory_is_an_input_error() {
        let e = Corpus::from_dir(Path::new("/nonexistent/corpus")).unwrap_err();
        assert!(e.is_input_error());
    }
}
