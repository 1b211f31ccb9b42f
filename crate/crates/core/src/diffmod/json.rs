//! JSON representation of modules.
//!
//! ```json
//! {"base": "R21", "h": 1, "rank": 1,
//!  "matrices": {"d1": [["-x^-2"]], "d2": [["0"]]},
//!  "label": "E(1/x)"}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{BaseKind, BaseRing, DiffModule, PMatrix};
use crate::error::{Error, Result};
use crate::series::parse_poly;

fn default_h() -> u32 {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleJson {
    base: String,
    #[serde(default = "default_h")]
    h: u32,
    rank: usize,
    matrices: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

/// Parses a module from its JSON value.
pub fn module_from_json(v: &Value) -> Result<DiffModule> {
    let mj: ModuleJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("module JSON: {e}")))?;
    let kind = BaseKind::parse(&mj.base)?;
    if mj.h == 0 {
        return Err(Error::Input("h must be positive".into()));
    }
    let names = kind.var_names();
    let mut mats: Vec<PMatrix> = Vec::new();
    for i in 0..kind.num_derivations() {
        let key = format!("d{}", i + 1);
        let rows = mj.matrices.get(&key).ok_or_else(|| Error::Input(format!("missing matrix `{key}`")))?;
        if rows.len() != mj.rank || rows.iter().any(|r| r.len() != mj.rank) {
            return Err(Error::Input(format!("matrix `{key}` is not {0}x{0}", mj.rank)));
        }
        let m = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_poly(s, names)).collect::<Result<Vec<_>>>())
            .collect::<Result<PMatrix>>()?;
        for e in m.iter().flatten() {
            e.clone().with_poles(kind.poles()).check_poles(names)?;
        }
        mats.push(m);
    }
    if let Some(extra) = mj.matrices.keys().find(|k| {
        !(1..=kind.num_derivations()).any(|i| **k == format!("d{i}"))
    }) {
        return Err(Error::Input(format!("unexpected matrix `{extra}` for base {}", kind.name())));
    }
    DiffModule::new(BaseRing::new(kind, mj.h), mats, mj.label)
}

/// Serializes a module; exponents and coefficients are exact rationals.
pub fn module_to_json(m: &DiffModule) -> Value {
    let names = m.base.kind.var_names();
    let matrices = m
        .mats
        .iter()
        .enumerate()
        .map(|(i, mat)| {
            (format!("d{}", i + 1), mat.iter().map(|r| r.iter().map(|e| e.to_string_with(names)).collect()).collect())
        })
        .collect();
    let mj = ModuleJson { base: m.base.kind.name().into(), h: m.base.h, rank: m.rank, matrices, label: m.label.clone() };
    serde_json::to_value(mj).expect("serializable")
}
