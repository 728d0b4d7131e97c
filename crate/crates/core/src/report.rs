//! Report records and byte-stable rendering.
//!
//! JSON objects are rendered with sorted keys and LF endings; rationals as
//! `p/q` strings. Fixed inputs produce byte-identical output.

use serde::{Deserialize, Serialize};

pub use crate::lie::CohomologyRecord;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One verification record, one per module operation exercised.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub target: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u32>,
    pub status: Status,
    /// Residual as a series rendering or a rational; "0" when clean.
    pub residual: String,
    pub notes: Vec<String>,
    /// Extra key/value payload (e.g. monomial moments), flattened.
    #[serde(flatten)]
    pub details: std::collections::BTreeMap<String, String>,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, target: serde_json::Value) -> Self {
        CheckRecord {
            check: check.into(),
            target,
            cutoff: None,
            status: Status::Pass,
            residual: "0".into(),
            notes: Vec::new(),
            details: Default::default(),
        }
    }

    pub fn with_cutoff(mut self, cutoff: u32) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn failed(mut self, residual: impl Into<String>) -> Self {
        self.status = Status::Fail;
        self.residual = residual.into();
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn detail(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.details.insert(key.into(), value.into());
        self
    }
}

/// A full run report: tool version, config echo, and the check records.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub overall_status: Status,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cohomology: Vec<CohomologyRecord>,
}

impl Report {
    pub fn new(command: impl Into<String>, config: serde_json::Value, seed: u64) -> Self {
        Report {
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            seed,
            overall_status: Status::Pass,
            checks: Vec::new(),
            cohomology: Vec::new(),
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        if record.status == Status::Fail {
            self.overall_status = Status::Fail;
        }
        self.checks.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        for r in records {
            self.push(r);
        }
    }

    pub fn passed(&self) -> bool {
        self.overall_status == Status::Pass
    }

    /// Deterministic JSON: serde_json object maps are BTree-backed, so keys
    /// come out sorted; pretty printing uses LF endings.
    pub fn render_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("value renders");
        out.push('\n');
        out
    }

    /// RFC-4180 style CSV, header row first, one row per check.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("check,target,cutoff,status,residual,notes\r\n");
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
            };
            let row = [
                c.check.clone(),
                c.target.to_string(),
                c.cutoff.map(|k| k.to_string()).unwrap_or_default(),
                status.to_string(),
                c.residual.replace('\n', "; "),
                c.notes.join("; "),
            ];
            let encoded: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
            out.push_str(&encoded.join(","));
            out.push_str("\r\n");
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One-line rendering of a series residual for reports.
pub fn series_residual(s: &crate::algebra::TruncSeries) -> String {
    if s.is_zero() {
        "0".into()
    } else {
        s.render().trim_end().replace('\n', "; ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_stable_and_sorted() {
        let mut report = Report::new("beta", serde_json::json!({"target": "sphere", "N": 3}), 7);
        report.push(
            CheckRecord::new("beta", serde_json::json!({"N": 3}))
                .with_cutoff(6)
                .note("c = 1/3 in (1/4 pi) units"),
        );
        let a = report.render_json();
        let b = report.render_json();
        assert_eq!(a, b);
        // keys sorted: "check" precedes "cutoff" precedes "notes".
        let check_pos = a.find("\"check\"").unwrap();
        let cutoff_pos = a.find("\"cutoff\"").unwrap();
        assert!(check_pos < cutoff_pos);
        assert!(a.ends_with('\n'));
        // Round-trip parse.
        let parsed: Report = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed.render_json(), a);
    }

    #[test]
    fn csv_quotes_fields() {
        let mut report = Report::new("cme", serde_json::json!({}), 0);
        report.push(
            CheckRecord::new("cme", serde_json::json!({"target": "sphere"}))
                .failed("1,0 : 2/3")
                .note("note with \"quotes\""),
        );
        let csv = report.render_csv();
        assert!(csv.starts_with("check,target,cutoff,status,residual,notes\r\n"));
        assert!(csv.contains("\"1,0 : 2/3\""));
        assert!(csv.contains("\"note with \"\"quotes\"\"\""));
    }
}
