//! JSON-lines ledgers.
//!
//! Check records go to the main ledger path. Typed reports (Newton traces,
//! index reports, ...) go to sibling files `{stem}.{kind}.jsonl` next to it.
//! All files are opened in append mode before any suite runs, and each one
//! receives its lines in a single write at the end, so an I/O failure never
//! leaves a half-written run behind.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::record::CheckRecord;

/// A typed report destined for the `{stem}.{kind}.jsonl` sibling file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub kind: String,
    pub body: Value,
}

impl Report {
    pub fn new(kind: &str, body: impl Serialize) -> Self {
        Report {
            kind: kind.to_string(),
            body: serde_json::to_value(body).expect("reports serialize to JSON"),
        }
    }
}

/// Output of one suite.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteOutput {
    pub records: Vec<CheckRecord>,
    pub reports: Vec<Report>,
}

impl SuiteOutput {
    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn report(&mut self, kind: &str, body: impl Serialize) {
        self.reports.push(Report::new(kind, body));
    }

    pub fn extend(&mut self, other: SuiteOutput) {
        self.records.extend(other.records);
        self.reports.extend(other.reports);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

pub fn sibling_path(out: &Path, kind: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{kind}.jsonl"))
}

pub struct LedgerFiles {
    main: File,
    siblings: BTreeMap<String, File>,
}

impl LedgerFiles {
    /// Opens `out` and the sibling files for `kinds` for appending.
    pub fn open(out: &Path, kinds: &[&str]) -> io::Result<Self> {
        let open = |p: &Path| OpenOptions::new().create(true).append(true).open(p);
        let main = open(out)?;
        let mut siblings = BTreeMap::new();
        for k in kinds {
            siblings.insert(k.to_string(), open(&sibling_path(out, k))?);
        }
        Ok(LedgerFiles { main, siblings })
    }

    /// Appends the records and reports. Reports of a kind without an open
    /// sibling file are dropped.
    pub fn append(&mut self, out: &SuiteOutput) -> io::Result<()> {
        self.main.write_all(&records_to_jsonl(&out.records))?;
        let mut by_kind: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
        for r in &out.reports {
            let buf = by_kind.entry(r.kind.as_str()).or_default();
            serde_json::to_writer(&mut *buf, &r.body).expect("values serialize");
            buf.push(b'\n');
        }
        for (kind, buf) in by_kind {
            if let Some(f) = self.siblings.get_mut(kind) {
                f.write_all(&buf)?;
            }
        }
        self.main.flush()
    }
}

pub fn records_to_jsonl(records: &[CheckRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r).expect("records serialize");
        buf.push(b'\n');
    }
    buf
}

/// Parses a check ledger, rejecting lines that do not match the schema.
pub fn parse_ledger(text: &str) -> serde_json::Result<Vec<CheckRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
