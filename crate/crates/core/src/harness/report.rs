use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{KgError, Result};

/// Result names a record may cite.
pub const REFERENCES: &[&str] = &[
    "group law",
    "dilation",
    "cylinder volume",
    "Vitali covering",
    "cut-off Lipschitz bound",
    "dilated cylinder inclusion",
    "cut-off lower bound",
    "localized normalisation",
    "layer-cake identities",
    "Gehring constants",
    "Fokker-Planck discretisation",
    "Kolmogorov kernel",
    "energy estimate",
    "solution integrability gain",
    "gradient integrability gain",
    "mean-free integrability gain",
    "divergence right inverse",
    "hypoelliptic Poincaré inequality",
    "Poincaré inequality for solutions",
    "reverse Hölder fit",
    "improved integrability",
];

/// One verdict with the values it was based on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub reference: String,
    /// First 16 hex digits of the SHA-256 of the inputs.
    pub inputs_hash: String,
    pub measured: BTreeMap<String, Value>,
    /// Comparison applied to the primary measurement, e.g. `<= 1e-12`.
    pub threshold: Option<String>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl CheckRecord {
    pub fn new<I: Serialize>(name: &str, reference: &str, inputs: &I) -> Self {
        let bytes = serde_json::to_vec(&(name, inputs)).expect("inputs serialise");
        let digest = Sha256::digest(&bytes);
        CheckRecord {
            name: name.into(),
            reference: reference.into(),
            inputs_hash: hex::encode(&digest[..8]),
            measured: BTreeMap::new(),
            threshold: None,
            pass: false,
            warnings: Vec::new(),
        }
    }

    pub fn measure<V: Serialize>(mut self, key: &str, value: V) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.measured.insert(key.into(), v);
        self
    }

    pub fn threshold(mut self, t: impl Into<String>) -> Self {
        self.threshold = Some(t.into());
        self
    }

    pub fn verdict(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn warn(mut self, w: impl Into<String>) -> Self {
        self.warnings.push(w.into());
        self
    }

    /// A numeric measurement, when present.
    pub fn value(&self, key: &str) -> Option<f64> {
        self.measured.get(key).and_then(Value::as_f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// A CSV table with a header row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<T: ToString>(&mut self, row: &[T]) {
        self.rows.push(row.iter().map(ToString::to_string).collect());
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| KgError::Format(e.to_string()))?;
        w.write_record(&self.header).map_err(|e| KgError::Format(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| KgError::Format(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub version: String,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    pub wall_time_s: f64,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, records: Vec<CheckRecord>, tables: Vec<Table>, wall: f64) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        SuiteReport {
            suite: suite.into(),
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            summary: Summary { total: records.len(), passed, failed: records.len() - passed },
            records,
            wall_time_s: wall,
            tables,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    /// Writes `report.json` and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)? + "\n")?;
        for t in &self.tables {
            t.write_csv(&dir.join(format!("{}.csv", t.name)))?;
        }
        Ok(())
    }
}

/// References in `report` that are not in [`REFERENCES`].
pub fn lint_references(report: &SuiteReport) -> Vec<String> {
    report
        .records
        .iter()
        .filter(|r| !REFERENCES.contains(&r.reference.as_str()))
        .map(|r| format!("{}: {}", r.name, r.reference))
        .collect()
}

/// Failing records of pinned quantities, as errors.
pub fn exceeded_pins(report: &SuiteReport) -> Vec<KgError> {
    report
        .records
        .iter()
        .filter(|r| !r.pass && r.measured.contains_key("pinned"))
        .map(|r| KgError::PinExceeded(format!("{} = {:e}", r.name, r.value("value").unwrap_or(f64::NAN))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_inputs() {
        let a = CheckRecord::new("x", "group law", &1);
        let b = CheckRecord::new("x", "group law", &2);
        assert_ne!(a.inputs_hash, b.inputs_hash);
        assert_eq!(a.inputs_hash.len(), 16);
    }

    #[test]
    fn summary_counts_and_lint() {
        let recs = vec![
            CheckRecord::new("a", "group law", &()).verdict(true),
            CheckRecord::new("b", "made up", &()).verdict(false),
        ];
        let r = SuiteReport::new("geometry", 1, recs, vec![], 0.0);
        assert_eq!(r.summary, Summary { total: 2, passed: 1, failed: 1 });
        assert_eq!(lint_references(&r), vec!["b: made up".to_string()]);
    }

    #[test]
    fn writes_json_and_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("t", &["a", "b"]);
        t.push(&[1.0, 2.0]);
        let r = SuiteReport::new("geometry", 1, vec![], vec![t], 0.0);
        r.write(dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(csv, "a,b\n1,2\n");
        let back: SuiteReport =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(back.summary, r.summary);
    }
}
