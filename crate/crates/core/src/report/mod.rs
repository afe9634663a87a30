//! Report assembly and emission: text, JSON, and SARIF 2.1.0.
//!
//! Emission is a pure function of the report; identical reports produce
//! identical bytes. Timestamps only appear when explicitly injected.

pub mod sarif;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::Diagnostic;

/// Output formats supported by the reporter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Sarif,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported output format: {0} (expected text, json, or sarif)")]
pub struct UnsupportedFormat(pub String);

impl FromStr for Format {
    type Err = UnsupportedFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "sarif" => Ok(Format::Sarif),
            other => Err(UnsupportedFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Sarif => "sarif",
        })
    }
}

pub const TOOL_NAME: &str = "klint";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A finished scan result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_name: String,
    pub tool_version: String,
    pub scan_root: String,
    /// Diagnostic count per category (category rendered as text).
    pub counts: BTreeMap<String, usize>,
    pub diagnostics: Vec<Diagnostic>,
    /// Present only when a timestamp was explicitly requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Report {
    /// Builds a report from sorted diagnostics.
    pub fn new(scan_root: impl Into<String>, diagnostics: Vec<Diagnostic>) -> Self {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for d in &diagnostics {
            *counts.entry(d.category.to_string()).or_default() += 1;
        }
        Self {
            tool_name: TOOL_NAME.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            scan_root: scan_root.into(),
            counts,
            diagnostics,
            timestamp: None,
        }
    }
}

/// The concrete fix suggestion for a diagnostic: the rule's own hint when
/// it produced one, otherwise the fix pattern's definition.
pub fn suggest_fix(diag: &Diagnostic) -> String {
    diag.fix_hint
        .clone()
        .unwrap_or_else(|| diag.fix_pattern.definition().to_string())
}

/// Serializes a report in the requested format. Byte-deterministic for a
/// given report.
pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Text => emit_text(report).into_bytes(),
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(report).expect("report serializes");
            bytes.push(b'\n');
            bytes
        }
        Format::Sarif => sarif::emit_sarif(report),
    }
}

fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    for d in &report.diagnostics {
        let file = d.location.file.to_string_lossy().replace('\\', "/");
        out.push_str(&format!(
            "{}:{}:{} [{}/{}] {} (consequence: {}; fix: {}: {})\n",
            file,
            d.location.start_line,
            d.location.start_col,
            d.rule_id,
            d.category,
            d.message,
            d.consequence,
            d.fix_pattern,
            suggest_fix(d),
        ));
    }
    if !report.diagnostics.is_empty() {
        out.push('\n');
    }
    let n = report.diagnostics.len();
    out.push_str(&format!("{n} defect{} found", if n == 1 { "" } else { "s" }));
    if n > 0 {
        out.push_str(" (");
        let mut first = true;
        for (category, count) in &report.counts {
            if !first {
                out.push_str(", ");
            }
            first = false;
            out.push_str(&format!("{category}: {count}"));
        }
        out.push(')');
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{KeyPath, Severity, SourceSpan};
    use crate::taxonomy::{Category, Consequence, FixPattern};

    fn sample_diag() -> Diagnostic {
        Diagnostic {
            rule_id: "VERSION_INCOMPAT".into(),
            category: Category::VersionIncompatibility.into(),
            severity: Severity::Error,
            location: SourceSpan::new("app/deploy.yaml", 1, 13, 1, 32),
            key_path: KeyPath::parse("apiVersion").unwrap(),
            message: "apiVersion 'extensions/v1beta1' is deprecated for kind Deployment".into(),
            consequence: Consequence::Crash,
            fix_pattern: FixPattern::ConfigurationValueChanges,
            fix_hint: Some("apps/v1".into()),
        }
    }

    #[test]
    fn text_line_carries_location_message_and_hint() {
        let report = Report::new(".", vec![sample_diag()]);
        let text = String::from_utf8(emit(&report, Format::Text)).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("app/deploy.yaml:1:13"));
        assert!(first.contains("[VERSION_INCOMPAT/VersionIncompatibility]"));
        assert!(first.contains("extensions/v1beta1"));
        assert!(first.contains("apps/v1"));
        assert!(text.contains("1 defect found"));
    }

    #[test]
    fn empty_report_prints_zero_defects() {
        let report = Report::new(".", vec![]);
        let text = String::from_utf8(emit(&report, Format::Text)).unwrap();
        assert_eq!(text, "0 defects found\n");
    }

    #[test]
    fn json_round_trips_byte_identically() {
        let report = Report::new("root", vec![sample_diag()]);
        let first = emit(&report, Format::Json);
        let parsed: Report = serde_json::from_slice(&first).unwrap();
        let second = emit(&parsed, Format::Json);
        assert_eq!(first, second);
        assert_eq!(parsed, report);
    }

    #[test]
    fn suggest_fix_prefers_hint_then_definition() {
        let with_hint = sample_diag();
        assert_eq!(suggest_fix(&with_hint), "apps/v1");

        let mut probing = sample_diag();
        probing.fix_hint = None;
        probing.fix_pattern = FixPattern::PropertyModification;
        assert!(suggest_fix(&probing).contains("property addition or property deletion"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("sarif".parse::<Format>().unwrap(), Format::Sarif);
        assert!("xml".parse::<Format>().is_err());
    }
}
