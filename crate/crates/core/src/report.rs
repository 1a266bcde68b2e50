//! Sessions, report assembly, and rendering.
//!
//! A [`Session`] owns one parameter set and computes each stage at most once.
//! Reports are key-sorted JSON; timings and cache status live on the session
//! and never enter the report, so reports are byte-identical across thread
//! counts and cache states.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cache::{self, CacheEntry, ARTIFACT_VERSION};
use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::genus::{
    class_conductors_from, genus_of_f, closed_form_audit, verify_big_action, AuditStatus, BigActionReport, ClassConductor, CoverClass,
    GenusReport, Pipeline,
};
use crate::laurent::LaurentPoly;
use crate::local::{hensel_t0, ConductorResult};
use crate::params::Params;
use crate::tower::{
    check_endo, cocycle_defect, commutator, presentation_equiv, prolong_translation, sigma, tau, transport, Endo, PresentationKind, RingMap,
    Tower, NGEN,
};

pub const DEFAULT_SAMPLES: usize = 50;
pub const DEFAULT_SEED: u64 = 0x5eed_b1ac_7104;

/// Description of the line sampler, echoed in every report.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), seeded from a 64-bit seed, one stream per class";

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: Params,
    pub samples: usize,
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(params: Params) -> RunConfig {
        RunConfig {
            params,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            cache_dir: None,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "p": self.params.p(),
            "s": self.params.s(),
            "samples": self.samples,
            "seed": self.seed,
            "rng": RNG_NAME,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Disabled,
    Miss,
    Hit,
    Stale,
}

/// What to compute and report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Conductor(CoverClass),
    Genus,
    Commutators,
    /// Coordinates of `a` in the power basis.
    Prolong(Vec<i64>),
    Audit,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Conductor(_) => "conductor",
            Command::Genus => "genus",
            Command::Commutators => "commutators",
            Command::Prolong(_) => "prolong",
            Command::Audit => "audit",
        }
    }
}

pub struct Session {
    config: RunConfig,
    field: Arc<Field>,
    pipeline: Option<Pipeline>,
    cached_reps: Option<Vec<(CoverClass, ConductorResult)>>,
    classes: Option<Vec<ClassConductor>>,
    genus: Option<GenusReport>,
    cache_status: CacheStatus,
    timings: Vec<(String, f64)>,
    notes: Vec<String>,
}

impl Session {
    pub fn new(config: RunConfig) -> Result<Session> {
        let params = config.params;
        Ok(Session {
            field: Arc::new(Field::new(params.p(), params.n())?),
            config,
            pipeline: None,
            cached_reps: None,
            classes: None,
            genus: None,
            cache_status: CacheStatus::Disabled,
            timings: Vec::new(),
            notes: Vec::new(),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn params(&self) -> Params {
        self.config.params
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn cache_status(&self) -> CacheStatus {
        self.cache_status
    }

    /// Wall-clock seconds per stage, in execution order.
    pub fn timings(&self) -> &[(String, f64)] {
        &self.timings
    }

    /// Non-fatal messages (cache write failures and the like).
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self);
        self.timings.push((stage.to_string(), start.elapsed().as_secs_f64()));
        out
    }

    pub fn pipeline(&mut self) -> Result<&Pipeline> {
        if self.pipeline.is_none() {
            let pl = self.timed("uniformizer", |s| s.load_pipeline())?;
            self.pipeline = Some(pl);
        }
        Ok(self.pipeline.as_ref().expect("pipeline initialized"))
    }

    fn load_pipeline(&mut self) -> Result<Pipeline> {
        let params = self.params();
        let Some(dir) = self.config.cache_dir.clone() else {
            self.cache_status = CacheStatus::Disabled;
            return Pipeline::new(params);
        };
        match cache::load(&dir, &self.field, params)? {
            Some(entry) => {
                let pl = Pipeline::from_uniformizer(self.field.clone(), entry.uniformizer)?;
                if cache::representatives_valid(&pl, &entry.representatives) {
                    self.cache_status = CacheStatus::Hit;
                    self.cached_reps = Some(entry.representatives);
                } else {
                    self.cache_status = CacheStatus::Stale;
                }
                Ok(pl)
            }
            None => {
                self.cache_status = CacheStatus::Miss;
                Pipeline::from_uniformizer(self.field.clone(), crate::local::build_uniformizer(&self.field, params)?)
            }
        }
    }

    pub fn classes(&mut self) -> Result<&[ClassConductor]> {
        if self.classes.is_none() {
            self.pipeline()?;
            let classes = self.timed("class_conductors", |s| {
                let pl = s.pipeline.as_ref().expect("pipeline initialized");
                let reps = match s.cached_reps.take() {
                    Some(r) => r,
                    None => CoverClass::ALL
                        .par_iter()
                        .map(|&c| (c, pl.conductor(c, &pl.representative(c))))
                        .collect(),
                };
                let store = matches!(s.cache_status, CacheStatus::Miss | CacheStatus::Stale);
                let entry = store.then(|| CacheEntry {
                    uniformizer: pl.uniformizer.clone(),
                    representatives: reps.clone(),
                });
                let classes = class_conductors_from(pl, reps, s.config.samples, s.config.seed)?;
                if let (Some(entry), Some(dir)) = (entry, s.config.cache_dir.clone()) {
                    if let Err(e) = cache::store(&dir, &s.field, &entry) {
                        s.notes.push(format!("cache write failed: {e}"));
                    }
                }
                Ok(classes)
            })?;
            self.classes = Some(classes);
        }
        Ok(self.classes.as_deref().expect("classes initialized"))
    }

    pub fn class(&mut self, class: CoverClass) -> Result<ClassConductor> {
        Ok(self
            .classes()?
            .iter()
            .find(|c| c.class == class)
            .expect("all classes computed")
            .clone())
    }

    pub fn genus(&mut self) -> Result<&GenusReport> {
        if self.genus.is_none() {
            let classes = self.classes()?.to_vec();
            let params = self.params();
            let g = self.timed("genus", |_| genus_of_f(params, classes))?;
            self.genus = Some(g);
        }
        Ok(self.genus.as_ref().expect("genus initialized"))
    }

    pub fn big_action(&mut self) -> Result<BigActionReport> {
        Ok(verify_big_action(self.genus()?))
    }

    // ---- sections ----

    pub fn uniformizer_section(&mut self) -> Result<Value> {
        let field = self.field.clone();
        let pl = self.pipeline()?;
        let d = &pl.uniformizer;
        let qb1 = d.expected_residual_valuation();
        let q = pl.params.q() as i64;
        let prec = qb1 + q;
        let t0 = hensel_t0(d, prec)?;
        let v = d.residual_valuation().unwrap_or(i64::MAX);
        let supports = pl.expansion_supports();
        Ok(json!({
            "a1": d.a1, "a2": d.a2, "b1": d.b1, "b2": d.b2,
            "x_of_z": format_laurent(&field, &d.x_of_z, 12),
            "y_head": format_laurent(&field, &d.y_head, 12),
            "residual_valuation": v,
            "expected_valuation": qb1,
            "residual_lowest_coeff": field.format(d.residual.coeff(v)),
            "t0": {
                "precision": prec,
                "valuation": t0.valuation(),
                "equation_holds": true,
            },
            "expansion_supports": {"f2": supports[0], "g1": supports[1], "g2": supports[2], "F": supports[3]},
        }))
    }

    pub fn conductor_section(&mut self, only: Option<CoverClass>) -> Result<Value> {
        let field = self.field.clone();
        let classes = self.classes()?;
        Ok(Value::Array(
            classes
                .iter()
                .filter(|c| only.map_or(true, |o| o == c.class))
                .map(|c| c.to_json(&field))
                .collect(),
        ))
    }

    pub fn genus_section(&mut self) -> Result<Value> {
        let field = self.field.clone();
        Ok(self.genus()?.to_json(&field))
    }

    pub fn big_action_section(&mut self) -> Result<Value> {
        Ok(self.big_action()?.to_json())
    }

    pub fn audit_rows(&mut self) -> Result<Vec<crate::genus::AuditRow>> {
        closed_form_audit(self.genus()?)
    }

    pub fn audit_section(&mut self) -> Result<Value> {
        Ok(Value::Array(self.audit_rows()?.iter().map(|r| r.to_json()).collect()))
    }

    /// `[σ_i, τ_j]` over the power basis, with certification of every
    /// `σ_i`, `τ_i` in all three presentations.
    pub fn commutator_section(&mut self) -> Result<Value> {
        let params = self.params();
        let field = self.field.clone();
        self.timed("commutators", |_| commutator_table(&field, params))
    }

    pub fn prolongation_section(&mut self, a_values: &[Fq], cocycles: &[(Fq, Fq)]) -> Result<Value> {
        let params = self.params();
        let field = self.field.clone();
        self.timed("prolongation", |_| prolongation_table(&field, params, a_values, cocycles))
    }

    pub fn equivalence_section(&mut self) -> Result<Value> {
        let params = self.params();
        let field = self.field.clone();
        self.timed("presentation_equivalence", |_| equivalence_table(&field, params))
    }
}

fn certify(tower: &Tower, e: &Endo, what: &str) -> Result<Endo> {
    check_endo(tower, e.images().to_vec())
        .certified()
        .ok_or_else(|| Error::integrity("endo certification", format!("{what} does not preserve the relations")))
}

fn commutator_table(field: &Arc<Field>, params: Params) -> Result<Value> {
    let mixed = Tower::new(field, params, PresentationKind::Mixed);
    let primed = Tower::new(field, params, PresentationKind::Primed);
    let unprimed = Tower::new(field, params, PresentationKind::Unprimed);
    let basis = field.basis();
    let n = basis.len();

    let sig: Vec<Endo> = basis
        .par_iter()
        .enumerate()
        .map(|(i, &g)| certify(&mixed, &sigma(&mixed, g), &format!("sigma_{}", i + 1)))
        .collect::<Result<_>>()?;
    let ta: Vec<Endo> = basis
        .par_iter()
        .enumerate()
        .map(|(i, &g)| certify(&mixed, &tau(&mixed, g), &format!("tau_{}", i + 1)))
        .collect::<Result<_>>()?;
    for (i, (s, t)) in sig.iter().zip(&ta).enumerate() {
        for to in [&primed, &unprimed] {
            certify(to, &transport(&mixed, to, s), &format!("sigma_{} in {:?}", i + 1, to.kind()))?;
            certify(to, &transport(&mixed, to, t), &format!("tau_{} in {:?}", i + 1, to.kind()))?;
        }
    }

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let shifts: Vec<Fq> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let c = commutator(&mixed, &sig[i], &ta[j])?;
            let fixed = (0..NGEN).all(|k| c.image(k) == &mixed.gen(k));
            match (c.is_certified() && fixed, c.shift(&mixed, NGEN).as_constant()) {
                (true, Some(shift)) if !shift.is_zero() => Ok(shift),
                _ => Err(Error::integrity(
                    "commutator",
                    format!("[sigma_{}, tau_{}] is not a nonzero translation of w", i + 1, j + 1),
                )),
            }
        })
        .collect::<Result<_>>()?;

    let two = field.from_int(2);
    let plus = pairs
        .iter()
        .zip(&shifts)
        .all(|(&(i, j), &s)| s == field.mul(two, field.mul(basis[i], basis[j])));
    let minus = pairs
        .iter()
        .zip(&shifts)
        .all(|(&(i, j), &s)| s == field.neg(field.mul(two, field.mul(basis[i], basis[j]))));
    if !(plus || minus) {
        return Err(Error::integrity("commutator", "w-shifts are not ±2 γ_i γ_j"));
    }

    let same_type = pairs.par_iter().all(|&(i, j)| {
        let a = commutator(&mixed, &sig[i], &sig[j]).map(|c| c.is_identity(&mixed));
        let b = commutator(&mixed, &ta[i], &ta[j]).map(|c| c.is_identity(&mixed));
        matches!((a, b), (Ok(true), Ok(true)))
    });
    if !same_type {
        return Err(Error::integrity("commutator", "two sigmas or two taus fail to commute"));
    }

    let table: Vec<Vec<String>> = (0..n)
        .map(|i| (0..n).map(|j| field.format(shifts[i * n + j])).collect())
        .collect();
    Ok(json!({
        "generators": mixed.generator_names(),
        "basis": basis.iter().map(|&g| field.format(g)).collect::<Vec<_>>(),
        "sigma_tau_w_shift": table,
        "shift_rule": if plus { "2*gi*gj" } else { "-2*gi*gj" },
        "all_certified": true,
        "certified_in": ["mixed", "primed", "unprimed"],
        "same_type_commute": true,
        "noncommuting": true,
    }))
}

fn prolongation_table(field: &Arc<Field>, params: Params, a_values: &[Fq], cocycles: &[(Fq, Fq)]) -> Result<Value> {
    let tower = Tower::new(field, params, PresentationKind::Primed);
    let names = tower.generator_names();
    let mut needed: Vec<Fq> = a_values.to_vec();
    for &(a, b) in cocycles {
        needed.extend([a, b, field.add(a, b)]);
    }
    needed.sort();
    needed.dedup();
    let built: BTreeMap<Fq, _> = needed
        .par_iter()
        .map(|&a| prolong_translation(&tower, a).map(|p| (a, p)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();

    let samples: Vec<Value> = a_values
        .iter()
        .map(|a| {
            let p = &built[a];
            let images: BTreeMap<&str, String> = (1..=NGEN)
                .map(|i| (names[i - 1], tower.format(p.endo.image(i))))
                .collect();
            json!({
                "a": field.format(*a),
                "images": images,
                "certified": p.endo.is_certified(),
                "multiplicity": p.multiplicity.to_string(),
            })
        })
        .collect();
    let cocycle_rows: Vec<Value> = cocycles
        .iter()
        .map(|&(a, b)| {
            let d = cocycle_defect(&tower, &built[&a], &built[&b], &built[&field.add(a, b)])?;
            Ok(json!({
                "a": field.format(a),
                "b": field.format(b),
                "in_galois_group": d.is_certified() && d.fixes_base(&tower),
                "trivial": d.is_identity(&tower),
            }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({
        "presentation": "primed",
        "samples": samples,
        "cocycles": cocycle_rows,
    }))
}

fn equivalence_table(field: &Arc<Field>, params: Params) -> Result<Value> {
    use PresentationKind::*;
    let unprimed = Tower::new(field, params, Unprimed);
    let primed = Tower::new(field, params, Primed);
    let links = presentation_equiv(&unprimed, &primed)?;
    if let Some(l) = links.iter().find(|l| !l.verified) {
        return Err(Error::integrity("presentation_equiv", format!("{} link not verified", l.primed)));
    }
    let towers = [Unprimed, Primed, Mixed].map(|k| Tower::new(field, params, k));
    let mut homs = true;
    for from in &towers {
        for to in &towers {
            if from.kind() != to.kind() {
                homs &= RingMap::between(to, from.kind()).is_homomorphism(from, to);
            }
        }
    }
    if !homs {
        return Err(Error::integrity("presentation_equiv", "dictionary is not a ring homomorphism"));
    }
    Ok(json!({
        "links": links.iter().map(|l| json!({
            "unprimed": l.unprimed,
            "primed": l.primed,
            "difference": primed.format(&l.witness),
            "verified": l.verified,
        })).collect::<Vec<_>>(),
        "dictionary_homomorphisms": homs,
    }))
}

/// `c*z^e` terms, lowest exponent first; elides after `max_terms`.
pub fn format_laurent(field: &Field, poly: &LaurentPoly, max_terms: usize) -> String {
    if poly.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (e, c)) in poly.terms().enumerate() {
        if k == max_terms {
            let _ = write!(out, " + ... ({} terms)", poly.len());
            break;
        }
        if k > 0 {
            out.push_str(" + ");
        }
        let cs = field.format(c);
        if cs != "1" {
            if cs.contains('+') {
                let _ = write!(out, "({cs})*");
            } else {
                let _ = write!(out, "{cs}*");
            }
        }
        let _ = write!(out, "z^{e}");
    }
    out
}

/// Sectioned report with integrity and audit bookkeeping.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub sections: BTreeMap<String, Value>,
    pub integrity_failures: Vec<String>,
    pub audit_mismatches: Vec<String>,
    config: Value,
    params: Value,
}

impl Report {
    fn new(command: &Command, cfg: &RunConfig) -> Report {
        let p = cfg.params;
        Report {
            command: command.name().to_string(),
            sections: BTreeMap::new(),
            integrity_failures: Vec::new(),
            audit_mismatches: Vec::new(),
            config: cfg.to_json(),
            params: json!({
                "p": p.p(), "s": p.s(), "n": p.n(), "q0": p.q0(), "q": p.q(),
                "paper_hypothesis": p.paper_hypothesis(),
            }),
        }
    }

    /// Records a section; integrity errors become failures, other errors abort.
    fn add(&mut self, name: &str, r: Result<Value>) -> Result<()> {
        match r {
            Ok(v) => {
                self.sections.insert(name.to_string(), v);
                Ok(())
            }
            Err(e) if e.is_integrity() => {
                self.integrity_failures.push(format!("{name}: {e}"));
                self.sections.insert(name.to_string(), json!({"error": e.to_string()}));
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    /// 0 consistent, 1 integrity failure, 3 audit mismatches only.
    pub fn exit_code(&self) -> i32 {
        if !self.integrity_failures.is_empty() {
            1
        } else if !self.audit_mismatches.is_empty() {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> Value {
        let mut top = serde_json::Map::new();
        top.insert("artifact_version".into(), json!(ARTIFACT_VERSION));
        top.insert("command".into(), json!(self.command));
        top.insert("config".into(), self.config.clone());
        top.insert("params".into(), self.params.clone());
        for (k, v) in &self.sections {
            top.insert(k.clone(), v.clone());
        }
        top.insert(
            "status".into(),
            json!({
                "integrity_failures": self.integrity_failures,
                "audit_mismatches": self.audit_mismatches,
                "exit_code": self.exit_code(),
            }),
        );
        Value::Object(top)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# bigaction {} (p={}, s={})\n",
            self.command, self.params["p"], self.params["s"]
        );
        let _ = writeln!(out, "artifact version {}, {}\n", ARTIFACT_VERSION, compact(&self.config));
        let _ = writeln!(out, "{}", kv_table(&self.params));
        for (name, v) in &self.sections {
            let _ = writeln!(out, "## {name}\n");
            let _ = writeln!(out, "{}", render_md(v));
        }
        let _ = writeln!(out, "## status\n");
        let _ = writeln!(out, "exit code: {}\n", self.exit_code());
        for f in &self.integrity_failures {
            let _ = writeln!(out, "- INTEGRITY FAILURE: {f}");
        }
        for m in &self.audit_mismatches {
            let _ = writeln!(out, "- audit mismatch: {m}");
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.replace('|', "\\|"),
        other => other.to_string().replace('|', "\\|"),
    }
}

fn kv_table(v: &Value) -> String {
    let mut out = String::from("| key | value |\n|---|---|\n");
    if let Value::Object(m) = v {
        for (k, x) in m {
            let _ = writeln!(out, "| {k} | {} |", compact(x));
        }
    }
    out
}

const LEADING_COLUMNS: [&str; 7] = ["item", "class", "a", "b", "unprimed", "primed", "status"];

fn render_md(v: &Value) -> String {
    match v {
        Value::Array(rows) if rows.iter().all(Value::is_object) && !rows.is_empty() => {
            let mut cols: Vec<&String> = Vec::new();
            for r in rows {
                for k in r.as_object().expect("object row").keys() {
                    if !cols.contains(&k) {
                        cols.push(k);
                    }
                }
            }
            // identifying columns first
            cols.sort_by_key(|c| LEADING_COLUMNS.iter().position(|l| l == c).unwrap_or(LEADING_COLUMNS.len()));
            let mut out = format!("| {} |\n|{}\n", cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" | "), "---|".repeat(cols.len()));
            for r in rows {
                let cells: Vec<String> = cols.iter().map(|c| compact(r.get(c.as_str()).unwrap_or(&Value::Null))).collect();
                let _ = writeln!(out, "| {} |", cells.join(" | "));
            }
            out
        }
        Value::Object(m) => {
            let mut out = String::from("| key | value |\n|---|---|\n");
            let mut nested = String::new();
            for (k, x) in m {
                match x {
                    Value::Array(a) if a.iter().any(Value::is_object) => {
                        let _ = write!(nested, "\n### {k}\n\n{}", render_md(x));
                    }
                    _ => {
                        let _ = writeln!(out, "| {k} | {} |", compact(x));
                    }
                }
            }
            out + &nested
        }
        other => format!("{}\n", compact(other)),
    }
}

/// Prolongation sample used by `verify`: 0 and the power basis, with
/// cocycles on consecutive basis pairs.
pub fn default_prolongation_sample(field: &Field) -> (Vec<Fq>, Vec<(Fq, Fq)>) {
    let basis = field.basis();
    let mut a = vec![Fq::ZERO];
    a.extend(basis.iter().copied());
    let n = basis.len();
    let mut pairs = vec![(basis[0], basis[0])];
    for i in 0..n {
        pairs.push((basis[i], basis[(i + 1) % n]));
    }
    pairs.dedup();
    (a, pairs)
}

/// Runs `command` on `session`.
pub fn run(session: &mut Session, command: &Command) -> Result<Report> {
    let mut report = Report::new(command, session.config());
    let field = session.field().clone();
    match command {
        Command::Verify => {
            let r = session.uniformizer_section();
            report.add("uniformizer", r)?;
            if report.integrity_failures.is_empty() {
                let r = session.conductor_section(None);
                report.add("conductors", r)?;
            }
            if report.integrity_failures.is_empty() {
                let r = session.genus_section();
                report.add("genus", r)?;
                let r = session.big_action_section();
                report.add("big_action", r)?;
                add_audit(session, &mut report)?;
            }
            let r = session.commutator_section();
            report.add("commutators", r)?;
            let (a, pairs) = default_prolongation_sample(&field);
            let r = session.prolongation_section(&a, &pairs);
            report.add("prolongation", r)?;
            let r = session.equivalence_section();
            report.add("presentation_equivalence", r)?;
        }
        Command::Conductor(class) => {
            let r = session.uniformizer_section();
            report.add("uniformizer", r)?;
            if report.integrity_failures.is_empty() {
                let r = session.conductor_section(Some(*class));
                report.add("conductors", r)?;
            }
        }
        Command::Genus => {
            let r = session.conductor_section(None);
            report.add("conductors", r)?;
            if report.integrity_failures.is_empty() {
                let r = session.genus_section();
                report.add("genus", r)?;
                let r = session.big_action_section();
                report.add("big_action", r)?;
            }
        }
        Command::Commutators => {
            let r = session.commutator_section();
            report.add("commutators", r)?;
        }
        Command::Prolong(coords) => {
            let a = field.from_coords(coords)?;
            let one = Fq::ONE;
            let r = session.prolongation_section(&[a], &[(a, one)]);
            report.add("prolongation", r)?;
        }
        Command::Audit => {
            let r = session.genus();
            match r {
                Ok(_) => add_audit(session, &mut report)?,
                Err(e) => report.add("audit", Err(e))?,
            }
        }
    }
    Ok(report)
}

fn add_audit(session: &mut Session, report: &mut Report) -> Result<()> {
    match session.audit_rows() {
        Ok(rows) => {
            for r in rows.iter().filter(|r| r.status == AuditStatus::Mismatch) {
                report
                    .audit_mismatches
                    .push(format!("{}: printed {} vs computed {}", r.item, crate::genus::fmt_rational(&r.printed), crate::genus::fmt_rational(&r.computed)));
            }
            report.add("audit", Ok(Value::Array(rows.iter().map(|r| r.to_json()).collect())))
        }
        Err(e) => report.add("audit", Err(e)),
    }
}
