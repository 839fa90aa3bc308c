//! Persistent result store.
//!
//! One record per line in a self-describing `key=value` format, so the store
//! stays greppable, diff-able, and merge-friendly. Records are uniquely keyed
//! by the checker name plus its identifying parameters; re-runs overwrite an
//! existing record only when the engine version changed or a rewrite is
//! forced. Corrupt lines are quarantined with a warning, never silently
//! dropped.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::report::{Claim, CongruenceReport, SkipReason, ValuationResult};

/// Parameter names that identify a record (as opposed to measured outputs
/// such as the empirical root of unity, which re-runs may recompute).
const KEY_PARAMS: &[&str] = &[
    "lambda", "p", "m", "s", "r", "k", "n", "depth", "variant", "weight",
];

/// Column order of the comma-separated export, fixed and documented here:
/// the identifying key fields first, then the verdict fields, then the
/// engine version. The timestamp is excluded from exports by default.
pub const EXPORT_COLUMNS: &[&str] = &[
    "checker",
    "lambda",
    "p",
    "m",
    "s",
    "r",
    "k",
    "n",
    "depth",
    "variant",
    "weight",
    "claimed",
    "observed",
    "precision",
    "pass",
    "skipped",
    "conjectural",
    "version",
];

/// One flattened checker outcome plus provenance.
#[derive(Clone, Debug)]
pub struct ResultRecord {
    pub report: CongruenceReport,
    pub version: String,
    pub timestamp: u64,
}

impl ResultRecord {
    pub fn new(report: CongruenceReport, version: &str) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ResultRecord {
            report,
            version: version.to_string(),
            timestamp,
        }
    }

    /// Unique key: checker name plus the identifying parameters in fixed
    /// order.
    pub fn key(&self) -> String {
        let mut key = self.report.checker.clone();
        for name in KEY_PARAMS {
            if let Some(v) = self.report.param(name) {
                key.push(' ');
                key.push_str(name);
                key.push('=');
                key.push_str(v);
            }
        }
        key
    }

    fn field(&self, name: &str) -> String {
        match name {
            "checker" => self.report.checker.clone(),
            "claimed" => self.report.claim.to_string(),
            "observed" => self.report.observed_defect.to_string(),
            "precision" => self
                .report
                .working_precision
                .map(|c| c.to_string())
                .unwrap_or_else(|| "-".to_string()),
            "pass" => self.report.pass.to_string(),
            "skipped" => self
                .report
                .skipped
                .map(|r| r.to_string())
                .unwrap_or_else(|| "-".to_string()),
            "conjectural" => self.report.conjectural.to_string(),
            "version" => self.version.clone(),
            "timestamp" => self.timestamp.to_string(),
            other => self.report.param(other).unwrap_or("-").to_string(),
        }
    }
}

impl fmt::Display for ResultRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "checker={}", self.report.checker)?;
        for (k, v) in &self.report.params {
            write!(f, " {k}={v}")?;
        }
        write!(
            f,
            " claimed={} observed={} precision={} pass={} skipped={} conjectural={} version={} timestamp={}",
            self.field("claimed"),
            self.field("observed"),
            self.field("precision"),
            self.field("pass"),
            self.field("skipped"),
            self.field("conjectural"),
            self.version,
            self.timestamp
        )
    }
}

const VERDICT_FIELDS: &[&str] = &[
    "claimed",
    "observed",
    "precision",
    "pass",
    "skipped",
    "conjectural",
    "version",
    "timestamp",
];

fn parse_record(line: &str) -> Option<ResultRecord> {
    let mut checker = None;
    let mut params = Vec::new();
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for token in line.split_whitespace() {
        let (k, v) = token.split_once('=')?;
        if k == "checker" {
            checker = Some(v.to_string());
        } else if VERDICT_FIELDS.contains(&k) {
            fields.insert(k, v);
        } else {
            params.push((k.to_string(), v.to_string()));
        }
    }
    let checker = checker?;
    let claim = match *fields.get("claimed")? {
        "exact" => Claim::Exact,
        k => Claim::ModPk(k.parse().ok()?),
    };
    let observed = match *fields.get("observed")? {
        "inf" => ValuationResult::Infinite,
        v => ValuationResult::Finite(v.parse().ok()?),
    };
    let working_precision = match *fields.get("precision")? {
        "-" => None,
        c => Some(c.parse().ok()?),
    };
    let pass: bool = fields.get("pass")?.parse().ok()?;
    let skipped = match *fields.get("skipped")? {
        "-" => None,
        r => Some(SkipReason::from_str(r).ok()?),
    };
    let conjectural: bool = fields.get("conjectural")?.parse().ok()?;
    let report = CongruenceReport {
        checker,
        params,
        claim,
        observed_defect: observed,
        working_precision,
        pass,
        skipped,
        conjectural,
    };
    Some(ResultRecord {
        report,
        version: fields.get("version")?.to_string(),
        timestamp: fields.get("timestamp")?.parse().ok()?,
    })
}

/// Key-value filter: a record matches when every requested field equals the
/// record's value for it ("checker" and all parameter names are addressable).
pub fn matches_filter(record: &ResultRecord, filter: &[(String, String)]) -> bool {
    filter.iter().all(|(k, v)| record.field(k) == *v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    TabularText,
    CommaSeparated,
}

/// The on-disk record store, held as a key-ordered map so every export and
/// save is deterministic.
pub struct Store {
    path: PathBuf,
    records: BTreeMap<String, ResultRecord>,
    /// Lines that failed to parse, kept verbatim for inspection.
    pub quarantined: Vec<String>,
}

impl Store {
    /// Load a store, quarantining corrupt lines with a warning on stderr.
    pub fn open(path: &Path) -> io::Result<Store> {
        let mut store = Store {
            path: path.to_path_buf(),
            records: BTreeMap::new(),
            quarantined: Vec::new(),
        };
        if path.exists() {
            for (lineno, line) in fs::read_to_string(path)?.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                match parse_record(line) {
                    Some(record) => {
                        store.records.insert(record.key(), record);
                    }
                    None => {
                        eprintln!(
                            "warning: {}:{}: corrupt record quarantined: {line}",
                            path.display(),
                            lineno + 1
                        );
                        store.quarantined.push(line.to_string());
                    }
                }
            }
        }
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Insert under the overwrite policy; returns true when the record was
    /// stored (fresh key, version change, or forced).
    pub fn insert(&mut self, record: ResultRecord, force: bool) -> bool {
        let key = record.key();
        if let Some(existing) = self.records.get(&key) {
            if !force && existing.version == record.version {
                return false;
            }
        }
        self.records.insert(key, record);
        true
    }

    pub fn query(&self, filter: &[(String, String)]) -> Vec<&ResultRecord> {
        self.records
            .values()
            .filter(|r| matches_filter(r, filter))
            .collect()
    }

    /// Rewrite the whole file in key order (quarantined lines are preserved
    /// at the end so nothing is silently dropped).
    pub fn save(&self) -> io::Result<()> {
        if let Some(dir) = self.path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let mut out = fs::File::create(&self.path)?;
        for record in self.records.values() {
            writeln!(out, "{record}")?;
        }
        for line in &self.quarantined {
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Bit-stable export of the filtered records, sorted by key, timestamp
    /// excluded.
    pub fn export(&self, filter: &[(String, String)], format: ExportFormat) -> String {
        let rows: Vec<&ResultRecord> = self.query(filter);
        match format {
            ExportFormat::CommaSeparated => {
                let mut out = EXPORT_COLUMNS.join(",");
                out.push('\n');
                for record in rows {
                    let cells: Vec<String> =
                        EXPORT_COLUMNS.iter().map(|c| record.field(c)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            ExportFormat::TabularText => {
                let mut widths: Vec<usize> =
                    EXPORT_COLUMNS.iter().map(|c| c.len()).collect();
                let table: Vec<Vec<String>> = rows
                    .iter()
                    .map(|record| {
                        EXPORT_COLUMNS
                            .iter()
                            .enumerate()
                            .map(|(i, c)| {
                                let cell = record.field(c);
                                widths[i] = widths[i].max(cell.len());
                                cell
                            })
                            .collect()
                    })
                    .collect();
                let mut out = String::new();
                let emit = |out: &mut String, cells: &[String], widths: &[usize]| {
                    for (i, cell) in cells.iter().enumerate() {
                        if i > 0 {
                            out.push_str("  ");
                        }
                        out.push_str(cell);
                        for _ in cell.len()..widths[i] {
                            out.push(' ');
                        }
                    }
                    while out.ends_with(' ') {
                        out.pop();
                    }
                    out.push('\n');
                };
                let header: Vec<String> =
                    EXPORT_COLUMNS.iter().map(|c| c.to_string()).collect();
                emit(&mut out, &header, &widths);
                for cells in &table {
                    emit(&mut out, cells, &widths);
                }
                out
            }
        }
    }

    /// Histogram of observed defect valuations over the filtered records
    /// ("inf" keyed separately), for summary export.
    pub fn defect_histogram(&self, filter: &[(String, String)]) -> BTreeMap<String, usize> {
        let mut hist = BTreeMap::new();
        for record in self.query(filter) {
            if record.report.skipped.is_some() {
                continue;
            }
            *hist
                .entry(record.report.observed_defect.to_string())
                .or_insert(0) += 1;
        }
        hist
    }
}
