//! Scoring an alert stream against a labeled defect dataset.
//!
//! An alert is a true positive when it matches a labeled defect on
//! category, file, and location; matching is one-to-one, so an alert can
//! satisfy at most one defect and vice versa. Precision is TP/(TP+FP) and
//! recall is TP/(TP+FN), per category and overall.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{Diagnostic, KeyPath};
use crate::report::sarif::SarifLog;
use crate::report::Report;
use crate::taxonomy::DefectCategory;

/// Matching tolerance when a defect is labeled only with a line number.
/// Labels drawn from diffs cite hunk positions, so exact equality is too
/// strict.
pub const LINE_TOLERANCE: u32 = 2;

/// One ground-truth defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDefect {
    pub id: String,
    pub file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key_path: Option<KeyPath>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    pub category: DefectCategory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern_note: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("failed to read dataset {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("malformed dataset row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("unsupported dataset format: {0} (expected .csv or .json)")]
    UnsupportedFormat(String),
}

/// Raw CSV row; every field starts as text and is validated afterwards.
#[derive(Debug, Deserialize)]
struct CsvRow {
    id: String,
    file: String,
    #[serde(default)]
    key_path: String,
    #[serde(default)]
    line: String,
    category: String,
    #[serde(default)]
    sub_category: String,
    #[serde(default)]
    pattern_note: String,
}

/// Loads a dataset from CSV (columns: id, file, key_path, line, category,
/// sub_category, pattern_note) or from a JSON array of defect objects.
pub fn load_dataset(path: &Path) -> Result<Vec<LabeledDefect>, DatasetError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match ext.as_str() {
        "csv" => load_dataset_csv(&text),
        "json" => load_dataset_json(&text),
        other => Err(DatasetError::UnsupportedFormat(other.to_string())),
    }
}

fn load_dataset_csv(text: &str) -> Result<Vec<LabeledDefect>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<CsvRow>().enumerate() {
        let row_no = i + 2; // 1-based, after the header line
        let row = row.map_err(|e| DatasetError::MalformedRow {
            row: row_no,
            reason: e.to_string(),
        })?;
        out.push(validate_row(row, row_no)?);
    }
    Ok(out)
}

fn validate_row(row: CsvRow, row_no: usize) -> Result<LabeledDefect, DatasetError> {
    let bad = |reason: String| DatasetError::MalformedRow { row: row_no, reason };

    let category = if row.sub_category.is_empty() {
        DefectCategory::parse(&row.category).map_err(|e| bad(e.to_string()))?
    } else {
        DefectCategory::parse(&format!("{}/{}", row.category, row.sub_category))
            .map_err(|e| bad(e.to_string()))?
    };

    let key_path = if row.key_path.is_empty() {
        None
    } else {
        Some(KeyPath::parse(&row.key_path).map_err(|e| bad(e.to_string()))?)
    };
    let line = if row.line.is_empty() {
        None
    } else {
        Some(
            row.line
                .parse::<u32>()
                .map_err(|e| bad(format!("invalid line number: {e}")))?,
        )
    };
    if key_path.is_none() && line.is_none() {
        return Err(bad("a defect needs a key_path or a line".to_string()));
    }

    Ok(LabeledDefect {
        id: row.id,
        file: row.file,
        key_path,
        line,
        category,
        pattern_note: if row.pattern_note.is_empty() {
            None
        } else {
            Some(row.pattern_note)
        },
    })
}

fn load_dataset_json(text: &str) -> Result<Vec<LabeledDefect>, DatasetError> {
    let defects: Vec<LabeledDefect> =
        serde_json::from_str(text).map_err(|e| DatasetError::MalformedRow {
            row: 0,
            reason: e.to_string(),
        })?;
    for (i, d) in defects.iter().enumerate() {
        if d.key_path.is_none() && d.line.is_none() {
            return Err(DatasetError::MalformedRow {
                row: i + 1,
                reason: "a defect needs a key_path or a line".to_string(),
            });
        }
    }
    Ok(defects)
}

/// The location facts the harness needs about one alert, independent of
/// which format it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalAlert {
    pub category: DefectCategory,
    pub file: String,
    pub key_path: Option<KeyPath>,
    pub line: u32,
}

impl From<&Diagnostic> for EvalAlert {
    fn from(d: &Diagnostic) -> Self {
        EvalAlert {
            category: d.category,
            file: d.location.file.to_string_lossy().into_owned(),
            key_path: Some(d.key_path.clone()),
            line: d.location.start_line,
        }
    }
}

fn normalize_path(p: &str) -> String {
    let p = p.replace('\\', "/");
    p.strip_prefix("./").unwrap_or(&p).to_string()
}

/// [`match_alert`] applied straight to a diagnostic.
pub fn match_diagnostic(alert: &Diagnostic, defect: &LabeledDefect) -> bool {
    match_alert(&EvalAlert::from(alert), defect)
}

/// The sameness criteria: same category (sub-category too when the label
/// carries one), same script, same location. Location means equal key
/// paths when the defect is labeled with one, otherwise lines within
/// [`LINE_TOLERANCE`].
pub fn match_alert(alert: &EvalAlert, defect: &LabeledDefect) -> bool {
    if alert.category.category() != defect.category.category() {
        return false;
    }
    if let Some(want_sub) = defect.category.sub_category() {
        if alert.category.sub_category() != Some(want_sub) {
            return false;
        }
    }
    if normalize_path(&alert.file) != normalize_path(&defect.file) {
        return false;
    }
    match (&defect.key_path, defect.line) {
        (Some(path), _) => alert.key_path.as_ref() == Some(path),
        (None, Some(line)) => alert.line.abs_diff(line) <= LINE_TOLERANCE,
        (None, None) => false,
    }
}

/// Counts and ratios for one bucket.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CategoryScore {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
}

impl CategoryScore {
    fn finish(&mut self) {
        self.precision = if self.tp + self.fp > 0 {
            Some(self.tp as f64 / (self.tp + self.fp) as f64)
        } else {
            None
        };
        self.recall = if self.tp + self.fn_ > 0 {
            Some(self.tp as f64 / (self.tp + self.fn_) as f64)
        } else {
            None
        };
    }
}

/// Per-category and overall precision/recall.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_category: BTreeMap<String, CategoryScore>,
    pub overall: CategoryScore,
}

/// Greedy one-to-one matching: alerts in (file, line, key path) order each
/// consume the first compatible unmatched defect in canonical dataset
/// order. Sorting both sides makes the result independent of input
/// permutation.
pub fn score(alerts: &[EvalAlert], defects: &[LabeledDefect]) -> EvalReport {
    let mut alert_order: Vec<usize> = (0..alerts.len()).collect();
    alert_order.sort_by(|&a, &b| {
        let ka = (
            normalize_path(&alerts[a].file),
            alerts[a].line,
            alerts[a].key_path.as_ref().map(KeyPath::render),
        );
        let kb = (
            normalize_path(&alerts[b].file),
            alerts[b].line,
            alerts[b].key_path.as_ref().map(KeyPath::render),
        );
        ka.cmp(&kb)
    });

    let mut defect_order: Vec<usize> = (0..defects.len()).collect();
    defect_order.sort_by(|&a, &b| {
        let ka = (
            normalize_path(&defects[a].file),
            defects[a].line.unwrap_or(0),
            defects[a].key_path.as_ref().map(KeyPath::render),
            defects[a].id.as_str(),
        );
        let kb = (
            normalize_path(&defects[b].file),
            defects[b].line.unwrap_or(0),
            defects[b].key_path.as_ref().map(KeyPath::render),
            defects[b].id.as_str(),
        );
        ka.cmp(&kb)
    });

    let mut defect_taken = vec![false; defects.len()];
    let mut alert_matched = vec![false; alerts.len()];

    let mut per_category: BTreeMap<String, CategoryScore> = BTreeMap::new();

    for &ai in &alert_order {
        for &di in &defect_order {
            if defect_taken[di] {
                continue;
            }
            if match_alert(&alerts[ai], &defects[di]) {
                defect_taken[di] = true;
                alert_matched[ai] = true;
                per_category
                    .entry(defects[di].category.to_string())
                    .or_default()
                    .tp += 1;
                break;
            }
        }
    }

    for (ai, matched) in alert_matched.iter().enumerate() {
        if !matched {
            per_category
                .entry(alerts[ai].category.to_string())
                .or_default()
                .fp += 1;
        }
    }
    for (di, taken) in defect_taken.iter().enumerate() {
        if !taken {
            per_category
                .entry(defects[di].category.to_string())
                .or_default()
                .fn_ += 1;
        }
    }

    let mut overall = CategoryScore::default();
    for s in per_category.values_mut() {
        overall.tp += s.tp;
        overall.fp += s.fp;
        overall.fn_ += s.fn_;
        s.finish();
    }
    overall.finish();

    EvalReport {
        per_category,
        overall,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AlertLoadError {
    #[error("failed to read alerts {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("alerts file is neither a native JSON report nor SARIF 2.1.0: {0}")]
    UnrecognizedFormat(String),
    #[error("SARIF result {index} has no usable category (expected a 'category' property on the result or its rule)")]
    MissingCategory { index: usize },
}

/// Loads alerts from a native JSON report or any SARIF 2.1.0 log.
///
/// SARIF results need a `category` entry in the result's property bag (or
/// on the matching rule descriptor); without category labels the sameness
/// criteria cannot be evaluated.
pub fn load_alerts(path: &Path) -> Result<Vec<EvalAlert>, AlertLoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| AlertLoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if let Ok(report) = serde_json::from_str::<Report>(&text) {
        return Ok(report.diagnostics.iter().map(EvalAlert::from).collect());
    }
    if let Ok(log) = serde_json::from_str::<SarifLog>(&text) {
        if log.version == "2.1.0" {
            return alerts_from_sarif(&log);
        }
    }
    Err(AlertLoadError::UnrecognizedFormat(
        path.display().to_string(),
    ))
}

fn alerts_from_sarif(log: &SarifLog) -> Result<Vec<EvalAlert>, AlertLoadError> {
    let mut alerts = Vec::new();
    let mut index = 0usize;
    for run in &log.runs {
        let rule_category = |rule_id: &str, rule_index: usize| -> Option<String> {
            let by_index = run.tool.driver.rules.get(rule_index);
            let rule = by_index.or_else(|| run.tool.driver.rules.iter().find(|r| r.id == rule_id));
            rule.and_then(|r| r.properties.as_ref())
                .and_then(|p| p.get("category"))
                .and_then(|v| v.as_str())
                .map(String::from)
        };
        for result in &run.results {
            let from_result = result
                .properties
                .as_ref()
                .and_then(|p| p.get("category"))
                .and_then(|v| v.as_str())
                .map(String::from);
            let category_text = from_result
                .or_else(|| rule_category(&result.rule_id, result.rule_index))
                .ok_or(AlertLoadError::MissingCategory { index })?;
            let category = DefectCategory::parse(&category_text)
                .map_err(|_| AlertLoadError::MissingCategory { index })?;

            let key_path = result
                .properties
                .as_ref()
                .and_then(|p| p.get("keyPath"))
                .and_then(|v| v.as_str())
                .and_then(|s| KeyPath::parse(s).ok());

            let Some(location) = result.locations.first() else {
                index += 1;
                continue;
            };
            alerts.push(EvalAlert {
                category,
                file: location.physical_location.artifact_location.uri.clone(),
                key_path,
                line: location.physical_location.region.start_line,
            });
            index += 1;
        }
    }
    Ok(alerts)
}
