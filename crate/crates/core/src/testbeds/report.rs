//! Testbed reports and their JSON and CSV forms.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::bounds::{evaluate, BoundId, BoundQuery, BoundValue};
use crate::error::{Error, Result};
use crate::estimators::Interval;

/// First line of every CSV report.
pub const CSV_HEADER_COMMENT: &str = "# genbound-csv v1";

pub const CSV_COLUMNS: [&str; 11] = [
    "testbed",
    "n",
    "seed",
    "bound_id",
    "info_source",
    "info_value",
    "bound_value",
    "vacuous",
    "empirical_gap",
    "ci_lo",
    "ci_hi",
];

/// Formats `x` with 9 significant digits and a decimal point, without locale.
pub fn fmt9(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.000000000".into();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..8).contains(&exp) {
        format!("{:.*}", (8 - exp) as usize, x)
    } else {
        sci
    }
}

/// One evaluated bound and where its information term came from.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub bound_id: String,
    /// `closed_form`, `estimated`, `cap`, or `none` for bounds without an info term.
    pub info_source: String,
    pub info_value: Option<f64>,
    pub value: f64,
    pub vacuous: bool,
    pub components: BTreeMap<String, f64>,
}

impl BoundRow {
    pub fn from_value(v: BoundValue<f64>, info_source: &str, info_value: Option<f64>) -> Self {
        Self {
            bound_id: v.name.to_string(),
            info_source: info_source.into(),
            info_value,
            value: v.value,
            vacuous: v.vacuous,
            components: v.components,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestbedReport {
    pub testbed: String,
    pub n: usize,
    pub seed: u64,
    pub m_trials: usize,
    pub empirical_gap: f64,
    pub ci: Interval,
    pub ci_level: f64,
    pub oracles: BTreeMap<String, f64>,
    pub estimates: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    pub notes: Vec<String>,
    pub bounds: Vec<BoundRow>,
    pub config: Value,
    /// Wall-clock seconds; never serialized, so reports stay byte-identical across runs.
    pub runtime_secs: f64,
}

/// A JSON number, or the [`fmt9`] string for non-finite values.
pub fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(fmt9(x)), Value::Number)
}

fn num_map(m: &BTreeMap<String, f64>) -> Value {
    Value::Object(m.iter().map(|(k, &v)| (k.clone(), json_number(v))).collect())
}

impl TestbedReport {
    pub fn new(testbed: &str, n: usize, seed: u64, m_trials: usize, config: Value) -> Self {
        Self {
            testbed: testbed.into(),
            n,
            seed,
            m_trials,
            empirical_gap: f64::NAN,
            ci: Interval {
                lo: f64::NAN,
                hi: f64::NAN,
            },
            ci_level: f64::NAN,
            oracles: BTreeMap::new(),
            estimates: BTreeMap::new(),
            checks: BTreeMap::new(),
            notes: Vec::new(),
            bounds: Vec::new(),
            config,
            runtime_secs: 0.0,
        }
    }

    pub fn oracle(&mut self, name: &str, v: f64) {
        self.oracles.insert(name.into(), v);
    }

    pub fn estimate(&mut self, name: &str, v: f64) {
        self.estimates.insert(name.into(), v);
    }

    pub fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.into(), ok);
    }

    pub fn bound(&mut self, row: BoundRow) {
        self.bounds.push(row);
    }

    /// Evaluates `id` on `q` and records it, keeping failures as notes.
    pub fn eval_bound(&mut self, id: BoundId, q: &BoundQuery<f64>, source: &str, info: Option<f64>) {
        match evaluate(id, q) {
            Ok(v) => self.bound(BoundRow::from_value(v, source, info)),
            Err(e) => self.notes.push(format!("{id}: {e}")),
        }
    }

    /// Keeps only bound rows whose id is in `keep` (all when `None`).
    pub fn retain_bounds(&mut self, keep: Option<&[BoundId]>) {
        if let Some(keep) = keep {
            self.bounds.retain(|b| keep.iter().any(|k| k.as_str() == b.bound_id));
        }
    }

    pub fn to_json(&self) -> Value {
        let mut o = Map::new();
        o.insert("testbed".into(), Value::String(self.testbed.clone()));
        o.insert("n".into(), self.n.into());
        o.insert("seed".into(), self.seed.into());
        o.insert("m_trials".into(), self.m_trials.into());
        o.insert("empirical_gap".into(), json_number(self.empirical_gap));
        o.insert(
            "ci".into(),
            serde_json::json!({"lo": json_number(self.ci.lo), "hi": json_number(self.ci.hi), "level": json_number(self.ci_level)}),
        );
        o.insert("oracles".into(), num_map(&self.oracles));
        o.insert("estimates".into(), num_map(&self.estimates));
        o.insert(
            "checks".into(),
            Value::Object(self.checks.iter().map(|(k, &v)| (k.clone(), Value::Bool(v))).collect()),
        );
        o.insert("notes".into(), self.notes.clone().into());
        let bounds = self
            .bounds
            .iter()
            .map(|b| {
                serde_json::json!({
                    "bound_id": b.bound_id,
                    "info_source": b.info_source,
                    "info_value": b.info_value.map_or(Value::Null, json_number),
                    "value": json_number(b.value),
                    "vacuous": b.vacuous,
                    "components": num_map(&b.components),
                })
            })
            .collect();
        o.insert("bounds".into(), Value::Array(bounds));
        o.insert("config".into(), self.config.clone());
        Value::Object(o)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// The flat CSV form: a version comment, a header row, one row per bound.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("{CSV_HEADER_COMMENT}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let err = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(CSV_COLUMNS).map_err(err)?;
            for b in &self.bounds {
                w.write_record([
                    self.testbed.clone(),
                    self.n.to_string(),
                    self.seed.to_string(),
                    b.bound_id.clone(),
                    b.info_source.clone(),
                    b.info_value.map_or_else(String::new, fmt9),
                    fmt9(b.value),
                    b.vacuous.to_string(),
                    fmt9(self.empirical_gap),
                    fmt9(self.ci.lo),
                    fmt9(self.ci.hi),
                ])
                .map_err(err)?;
            }
            w.flush().map_err(|e| Error::Io(e.to_string()))?;
        }
        String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
    }

    /// Fails with [`Error::IdentityViolation`] when any check whose name starts with
    /// `identity` is false.
    pub fn require_identities(&self) -> Result<()> {
        match self.checks.iter().find(|(k, &v)| k.starts_with("identity") && !v) {
            Some((k, _)) => Err(Error::IdentityViolation(format!("{} check {k} failed", self.testbed))),
            None => Ok(()),
        }
    }
}
