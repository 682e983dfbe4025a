//! Result records and their CSV payload.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::ExperimentConfig;

/// Marker row opening the aggregate block of a CSV payload.
pub const SUMMARY_MARKER: &str = "# summary";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    pub stderr: f64,
}

impl Metric {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0 }
    }

    pub fn new(value: f64, stderr: f64) -> Self {
        Self { value, stderr }
    }
}

/// Per-point rows under a header with units, followed by a summary block of
/// `(metric, value, stderr)` rows.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<(String, Metric)>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), ..Self::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, name: impl Into<String>, metric: Metric) {
        self.summary.push((name.into(), metric));
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let io = "in-memory csv write";
        w.write_record(&self.header).expect(io);
        for r in &self.rows {
            w.write_record(r).expect(io);
        }
        if !self.summary.is_empty() {
            w.write_record([SUMMARY_MARKER]).expect(io);
            w.write_record(["metric", "value", "stderr"]).expect(io);
            for (name, m) in &self.summary {
                w.write_record([name.clone(), num(m.value), num(m.stderr)]).expect(io);
            }
        }
        String::from_utf8(w.into_inner().expect(io)).expect("csv is utf-8")
    }
}

/// Shortest round-trip formatting.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn unix_millis() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub version: String,
    pub config: ExperimentConfig,
    pub metrics: BTreeMap<String, Metric>,
    pub table: Table,
    pub data: serde_json::Value,
    pub timestamps: Timestamps,
}

impl ResultRecord {
    pub fn new(
        config: ExperimentConfig,
        metrics: BTreeMap<String, Metric>,
        table: Table,
        data: serde_json::Value,
        started_unix_ms: u128,
    ) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            metrics,
            table,
            data,
            timestamps: Timestamps { started_unix_ms, finished_unix_ms: unix_millis() },
        }
    }

    pub fn csv(&self) -> String {
        self.table.to_csv()
    }
}
