//! Result tables and their CSV encoding.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::PatternSample;
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// One long-format result row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub case: String,
    pub scheme: String,
    /// Empty for rows that do not depend on the INR.
    pub inr_db: Option<f64>,
    /// Empty for rows that summarize an SNR sweep.
    pub snr_db: Option<f64>,
    /// Symbol index for per-symbol curves, empty otherwise.
    pub symbol: Option<usize>,
    pub metric: String,
    pub value: f64,
    pub scenario_hash: String,
}

impl Row {
    fn sort_key(&self) -> (&str, &str, &str, Option<u64>, Option<u64>, Option<usize>) {
        (&self.case, &self.scheme, &self.metric, self.inr_db.map(order_bits), self.snr_db.map(order_bits), self.symbol)
    }
}

/// Bit pattern that sorts like the float (for finite and infinite values).
fn order_bits(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Named two-column pattern table.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternTable {
    /// File stem suffix: the table is written to `patterns_<label>.csv`.
    pub label: String,
    pub samples: Vec<PatternSample>,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentResult {
    pub rows: Vec<Row>,
    pub patterns: Vec<PatternTable>,
    /// `key: value` metadata lines.
    pub metadata: Vec<(String, String)>,
}

impl ExperimentResult {
    pub fn push_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    /// Rows matching `case`, `scheme` and `metric`.
    pub fn select<'a>(&'a self, case: &'a str, scheme: &'a str, metric: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.case == case && r.scheme == scheme && r.metric == metric)
    }

    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        self.patterns.sort_by(|a, b| a.label.cmp(&b.label));
    }

    /// `results.csv` contents: comment metadata, header, sorted rows.
    pub fn results_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# schema_version: {SCHEMA_VERSION}");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str("case,scheme,inr_db,snr_db,symbol,metric,value,scenario_hash\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.case,
                r.scheme,
                cell(r.inr_db),
                cell(r.snr_db),
                cell(r.symbol),
                r.metric,
                r.value,
                r.scenario_hash
            );
        }
        out
    }

    /// Writes `results.csv`, `patterns_<label>.csv` and `meta.txt` into
    /// `dir`, replacing earlier files. `extra_meta` goes to `meta.txt` only,
    /// so run-specific values such as timestamps keep the CSVs reproducible.
    pub fn write(&self, dir: &Path, extra_meta: &[(String, String)]) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let results = dir.join("results.csv");
        fs::write(&results, self.results_csv())?;
        written.push(results);
        for table in &self.patterns {
            let path = dir.join(format!("patterns_{}.csv", table.label));
            let mut body = String::from("theta_deg,gain_db\n");
            for s in &table.samples {
                let _ = writeln!(body, "{},{}", s.theta_deg, s.gain_db);
            }
            fs::write(&path, body)?;
            written.push(path);
        }
        let meta = dir.join("meta.txt");
        let mut body = String::new();
        let _ = writeln!(body, "schema_version: {SCHEMA_VERSION}");
        for (k, v) in self.metadata.iter().chain(extra_meta) {
            let _ = writeln!(body, "{k}: {v}");
        }
        fs::write(&meta, body)?;
        written.push(meta);
        Ok(written)
    }
}

/// First 16 hex digits of the SHA-256 of the value's TOML encoding.
pub fn scenario_hash<T: Serialize>(value: &T) -> String {
    let text = toml::to_string(value).unwrap_or_else(|e| format!("unserializable: {e}"));
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(&digest[..8])
}
