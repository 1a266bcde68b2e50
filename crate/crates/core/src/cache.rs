//! On-disk cache of the uniformizer and the class representatives' reductions.
//!
//! One JSON file per `(p, s, artifact version)`, named by a SHA-256 of that
//! key. Loaded data is re-validated; anything that fails validation is
//! treated as a miss.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::genus::{CoverClass, Pipeline};
use crate::laurent::LaurentPoly;
use crate::local::{ConductorResult, ReducedPart, T0Certificate, UniformizerData, Witness};
use crate::params::Params;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable consulted when no cache directory is given.
pub const CACHE_ENV: &str = "BIGACTION_CACHE_DIR";

pub fn cache_key(params: Params) -> String {
    let mut h = Sha256::new();
    h.update(format!("bigaction-pipeline|p={}|s={}|v={}", params.p(), params.s(), ARTIFACT_VERSION));
    hex::encode(&h.finalize()[..12])
}

pub fn cache_path(dir: &Path, params: Params) -> PathBuf {
    dir.join(format!("pipeline-{}.json", cache_key(params)))
}

/// Writes `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io(e)
    })
}

/// Cached data for one parameter set.
#[derive(Clone, Debug)]
pub struct CacheEntry {
    pub uniformizer: UniformizerData,
    pub representatives: Vec<(CoverClass, ConductorResult)>,
}

fn coeff_json(field: &Field, c: crate::field::Fq) -> Value {
    json!(field.coords(c))
}

fn coeff_from(field: &Field, v: &Value) -> Result<crate::field::Fq> {
    let coords: Vec<i64> = serde_json::from_value(v.clone())?;
    field.from_coords(&coords)
}

fn bad(msg: &str) -> Error {
    Error::Parameter(format!("malformed cache entry: {msg}"))
}

fn conductor_json(field: &Field, class: CoverClass, r: &ConductorResult) -> Value {
    json!({
        "class": class.label(),
        "conductor": r.conductor,
        "break": r.break_t,
        "geometric": r.geometric,
        "certificate": r.certificate.map(|c| json!([c.pole_budget, c.t0_valuation])),
        "reduced": r.reduced.reduced.to_json(),
        "dropped": r.reduced.dropped.to_json(),
        "constant_trace": r.reduced.constant_trace,
        "witnesses": r.reduced.witnesses.iter().map(|w| json!([w.exponent, coeff_json(field, w.coeff)])).collect::<Vec<_>>(),
    })
}

fn conductor_from(field: &Arc<Field>, v: &Value) -> Result<(CoverClass, ConductorResult)> {
    let class = v["class"]
        .as_str()
        .and_then(CoverClass::from_label)
        .ok_or_else(|| bad("class"))?;
    let u = |k: &str| v[k].as_u64().ok_or_else(|| bad(k));
    let witnesses = v["witnesses"]
        .as_array()
        .ok_or_else(|| bad("witnesses"))?
        .iter()
        .map(|w| {
            Ok(Witness {
                exponent: w[0].as_i64().ok_or_else(|| bad("witness exponent"))?,
                coeff: coeff_from(field, &w[1])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let certificate = match &v["certificate"] {
        Value::Null => None,
        c => Some(T0Certificate {
            pole_budget: c[0].as_i64().ok_or_else(|| bad("certificate"))?,
            t0_valuation: c[1].as_i64().ok_or_else(|| bad("certificate"))?,
        }),
    };
    Ok((
        class,
        ConductorResult {
            label: class.label().to_string(),
            reduced: ReducedPart {
                reduced: LaurentPoly::from_json(field, &v["reduced"])?,
                witnesses,
                dropped: LaurentPoly::from_json(field, &v["dropped"])?,
                constant_trace: u("constant_trace")? as u32,
            },
            break_t: u("break")?,
            conductor: u("conductor")?,
            geometric: v["geometric"].as_bool().ok_or_else(|| bad("geometric"))?,
            certificate,
        },
    ))
}

pub fn entry_to_json(field: &Field, entry: &CacheEntry) -> Value {
    let d = &entry.uniformizer;
    json!({
        "key": {"p": d.params.p(), "s": d.params.s(), "version": ARTIFACT_VERSION},
        "uniformizer": {
            "a1": d.a1, "a2": d.a2, "b1": d.b1, "b2": d.b2,
            "x_of_z": d.x_of_z.to_json(),
            "y_head": d.y_head.to_json(),
            "residual": d.residual.to_json(),
        },
        "representatives": entry.representatives.iter().map(|(c, r)| conductor_json(field, *c, r)).collect::<Vec<_>>(),
    })
}

pub fn entry_from_json(field: &Arc<Field>, params: Params, v: &Value) -> Result<CacheEntry> {
    let key = &v["key"];
    if key["p"].as_u64() != Some(params.p() as u64)
        || key["s"].as_u64() != Some(params.s() as u64)
        || key["version"].as_str() != Some(ARTIFACT_VERSION)
    {
        return Err(bad("key does not match"));
    }
    let u = &v["uniformizer"];
    let int = |k: &str| u[k].as_i64().ok_or_else(|| bad(k));
    let uniformizer = UniformizerData {
        params,
        a1: int("a1")?,
        a2: int("a2")?,
        b1: int("b1")?,
        b2: int("b2")?,
        x_of_z: LaurentPoly::from_json(field, &u["x_of_z"])?,
        y_head: LaurentPoly::from_json(field, &u["y_head"])?,
        residual: LaurentPoly::from_json(field, &u["residual"])?,
    };
    let representatives = v["representatives"]
        .as_array()
        .ok_or_else(|| bad("representatives"))?
        .iter()
        .map(|r| conductor_from(field, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(CacheEntry {
        uniformizer,
        representatives,
    })
}

/// Loads and re-validates an entry. `Ok(None)` on a miss or a stale entry.
pub fn load(dir: &Path, field: &Arc<Field>, params: Params) -> Result<Option<CacheEntry>> {
    let path = cache_path(dir, params);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let Ok(value) = serde_json::from_str::<Value>(&text) else {
        return Ok(None);
    };
    let Ok(entry) = entry_from_json(field, params, &value) else {
        return Ok(None);
    };
    if entry.uniformizer.check().is_err() {
        return Ok(None);
    }
    Ok(Some(entry))
}

/// Checks cached representatives against freshly expanded right-hand sides.
pub fn representatives_valid(pipeline: &Pipeline, reps: &[(CoverClass, ConductorResult)]) -> bool {
    reps.len() == CoverClass::ALL.len()
        && reps.iter().zip(CoverClass::ALL).all(|((c, r), expect)| {
            *c == expect && r.reduced.verify(&pipeline.line_expansion(*c, &pipeline.representative(*c)).poly)
        })
}

pub fn store(dir: &Path, field: &Field, entry: &CacheEntry) -> Result<PathBuf> {
    let path = cache_path(dir, entry.uniformizer.params);
    let text = serde_json::to_string(&entry_to_json(field, entry))?;
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}
