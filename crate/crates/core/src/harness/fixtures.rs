//! Newform fixture ingestion, the bundled fixture set, and conversion of
//! plain eigenvalue tables into the fixture schema.

use super::HarnessError;
use crate::arith::is_prime;
use crate::field::{make_field, FieldDescriptor, NumberField};
use crate::petersson::{Newform, NewformRecord, RAMANUJAN_SLACK};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

pub const LEVEL11: &str = include_str!("../../fixtures/level11.jsonl");
pub const LEVEL37: &str = include_str!("../../fixtures/level37.jsonl");
pub const LEVEL1_WEIGHT12: &str = include_str!("../../fixtures/level1_weight12.jsonl");
pub const DIMS_WEIGHT2: &str = include_str!("../../fixtures/dims_weight2.json");

/// Bundled newform files by name.
pub fn bundled() -> [(&'static str, &'static str); 3] {
    [("level11.jsonl", LEVEL11), ("level37.jsonl", LEVEL37), ("level1_weight12.jsonl", LEVEL1_WEIGHT12)]
}

/// A validated record with its source line.
#[derive(Clone, Debug)]
pub struct FixtureRecord {
    pub line: usize,
    pub field: NumberField,
    pub form: Newform,
    /// Whether the declared sign agrees with the computed root number.
    pub sign_consistent: bool,
    pub computed_sign: i32,
    /// Prime keys whose eigenvalue exceeds the Ramanujan bound plus slack.
    pub ramanujan_violations: Vec<String>,
}

fn at(source: &str, line: usize, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Fixture { file: source.into(), line, message: msg.to_string() }
}

/// Parses and validates JSON-lines text; blank lines and `#` comments are
/// skipped. Schema errors carry the one-based line number.
pub fn ingest_str(text: &str, source: &str) -> Result<Vec<FixtureRecord>, HarnessError> {
    let mut fields: BTreeMap<String, NumberField> = BTreeMap::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let rec: NewformRecord = serde_json::from_str(t).map_err(|e| at(source, line, e))?;
        let field = match fields.get(&rec.field) {
            Some(f) => f.clone(),
            None => {
                let desc = FieldDescriptor::parse(&rec.field).map_err(|e| at(source, line, e))?;
                let f = make_field(&desc).map_err(|e| at(source, line, e))?;
                fields.insert(rec.field.clone(), f.clone());
                f
            }
        };
        let form = Newform::new(&field, rec, RAMANUJAN_SLACK).map_err(|e| at(source, line, e))?;
        let computed_sign = form.sign_epsilon(&field).map_err(|e| at(source, line, e))?;
        out.push(FixtureRecord {
            line,
            sign_consistent: computed_sign == form.record.sign,
            computed_sign,
            ramanujan_violations: form.ramanujan_violations.clone(),
            field,
            form,
        });
    }
    Ok(out)
}

pub fn ingest_fixtures(path: &Path) -> Result<Vec<FixtureRecord>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    ingest_str(&text, &path.display().to_string())
}

pub fn bundled_records() -> Result<Vec<(String, FixtureRecord)>, HarnessError> {
    let mut out = Vec::new();
    for (name, text) in bundled() {
        for r in ingest_str(text, name)? {
            out.push((name.to_string(), r));
        }
    }
    Ok(out)
}

/// Bundled records over the rationals at the given level and weight.
pub fn bundled_at_level(level: u64, k: u32) -> Result<Vec<FixtureRecord>, HarnessError> {
    Ok(bundled_records()?
        .into_iter()
        .map(|(_, r)| r)
        .filter(|r| r.field.degree == 1 && r.form.record.level == level && r.form.weight == k)
        .collect())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionTable {
    pub field: String,
    pub weight: u32,
    pub dims: BTreeMap<String, u64>,
}

impl DimensionTable {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| at("dimension table", e.line(), e))
    }

    /// `(level, dimension)` in ascending level.
    pub fn points(&self) -> Result<Vec<(u64, u64)>, HarnessError> {
        let mut v = self
            .dims
            .iter()
            .map(|(k, &d)| {
                k.parse::<u64>().map(|q| (q, d)).map_err(|_| HarnessError::Config(format!("level key `{k}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        v.sort();
        Ok(v)
    }
}

/// Converts a table over the rationals with lines
/// `label level weight sign a_2 a_3 a_5 ...` (consecutive primes, `#`
/// comments allowed) into fixture JSON lines, validating each record.
pub fn import_table(text: &str, source: &str) -> Result<String, HarnessError> {
    let mut out = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let tok: Vec<&str> = t.split(|c: char| c.is_whitespace() || c == ',').filter(|x| !x.is_empty()).collect();
        if tok.len() < 5 {
            return Err(at(source, line, "expected label, level, weight, sign and at least one a_p"));
        }
        let int = |s: &str, what: &str| s.parse::<i64>().map_err(|_| at(source, line, format!("{what} `{s}`")));
        let level = int(tok[1], "level")?;
        let weight = int(tok[2], "weight")?;
        let sign = int(tok[3], "sign")?;
        if level < 1 || weight < 1 {
            return Err(at(source, line, "level and weight must be positive"));
        }
        let mut ap = BTreeMap::new();
        let mut p = 1u64;
        for s in &tok[4..] {
            p += 1;
            while !is_prime(p) {
                p += 1;
            }
            ap.insert(p.to_string(), int(s, "a_p")?);
        }
        let rec = NewformRecord {
            field: "Q".into(),
            level: level as u64,
            level_ideal: None,
            weight: vec![weight as u32],
            label: tok[0].into(),
            ap,
            sign: sign as i32,
            central_value: None,
        };
        let json = serde_json::to_string(&rec).map_err(|e| at(source, line, e))?;
        ingest_str(&json, source).map_err(|e| match e {
            HarnessError::Fixture { message, .. } => at(source, line, message),
            other => other,
        })?;
        out.push_str(&json);
        out.push('\n');
    }
    Ok(out)
}
