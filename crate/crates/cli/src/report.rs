//! Deterministic verification reports.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use weightlab_core::complexes::CohomologyProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl From<bool> for Status {
    fn from(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub status: Status,
    pub details: Value,
}

impl Record {
    pub fn new(name: &str, passed: bool, details: Value) -> Record {
        Record { name: name.to_string(), parameters: BTreeMap::new(), status: passed.into(), details }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Record {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One human-readable line.
    pub fn summary(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let note = self.details.get("summary").and_then(Value::as_str).unwrap_or("");
        let mut line = format!("{status} {}", self.name);
        if !params.is_empty() {
            line.push(' ');
            line.push_str(&params.join(" "));
        }
        if !note.is_empty() {
            line.push_str(": ");
            line.push_str(note);
        }
        line
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub digest: String,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: &str, digest: String, records: Vec<Record>) -> Report {
        Report {
            tool: "weightlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            digest,
            records,
        }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(Record::passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// `[[degree, dim], ...]` over the nonzero degrees.
pub fn profile_json(p: &CohomologyProfile) -> Value {
    Value::Array(p.dims.iter().map(|(k, d)| json!([k, d])).collect())
}

/// `H^1 dim 2, H^2 dim 1`, or `acyclic`.
pub fn profile_text(p: &CohomologyProfile) -> String {
    if p.is_acyclic() {
        return "acyclic".into();
    }
    p.dims.iter().map(|(k, d)| format!("H^{k} dim {d}")).collect::<Vec<_>>().join(", ")
}
