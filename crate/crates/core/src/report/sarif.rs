//! SARIF 2.1.0 emission and ingestion.
//!
//! One run per log, one rule descriptor per distinct rule id, one result
//! per diagnostic. Category, key path, consequence, and fix metadata ride
//! in property bags so scoring a SARIF stream loses nothing relative to
//! the native JSON report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::Diagnostic;
use crate::report::{suggest_fix, Report};

pub const SARIF_SCHEMA_URI: &str =
    "https://raw.githubusercontent.com/oasis-tcs/sarif-spec/master/Schemata/sarif-schema-2.1.0.json";
pub const SARIF_VERSION: &str = "2.1.0";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifLog {
    #[serde(rename = "$schema")]
    pub schema: String,
    pub version: String,
    pub runs: Vec<SarifRun>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifRun {
    pub tool: SarifTool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invocations: Option<Vec<SarifInvocation>>,
    #[serde(rename = "columnKind")]
    pub column_kind: String,
    pub results: Vec<SarifResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifTool {
    pub driver: SarifDriver,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifDriver {
    pub name: String,
    pub version: String,
    pub rules: Vec<SarifRule>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifInvocation {
    #[serde(rename = "executionSuccessful")]
    pub execution_successful: bool,
    #[serde(rename = "startTimeUtc", skip_serializing_if = "Option::is_none")]
    pub start_time_utc: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifRule {
    pub id: String,
    pub name: String,
    #[serde(rename = "shortDescription")]
    pub short_description: SarifMessage,
    #[serde(rename = "defaultConfiguration")]
    pub default_configuration: SarifConfiguration,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub properties: Option<BTreeMap<String, serde_json::Value>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifMessage {
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifConfiguration {
    pub level: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifResult {
    #[serde(rename = "ruleId")]
    pub rule_id: String,
    #[serde(rename = "ruleIndex")]
    pub rule_index: usize,
    pub level: String,
    pub message: SarifMessage,
    pub locations: Vec<SarifLocation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub properties: Option<BTreeMap<String, serde_json::Value>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifLocation {
    #[serde(rename = "physicalLocation")]
    pub physical_location: SarifPhysicalLocation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifPhysicalLocation {
    #[serde(rename = "artifactLocation")]
    pub artifact_location: SarifArtifactLocation,
    pub region: SarifRegion,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifArtifactLocation {
    pub uri: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarifRegion {
    #[serde(rename = "startLine")]
    pub start_line: u32,
    #[serde(rename = "startColumn")]
    pub start_column: u32,
    #[serde(rename = "endLine")]
    pub end_line: u32,
    #[serde(rename = "endColumn")]
    pub end_column: u32,
}

fn result_properties(diag: &Diagnostic) -> BTreeMap<String, serde_json::Value> {
    let mut props = BTreeMap::new();
    props.insert("category".to_string(), diag.category.to_string().into());
    props.insert("keyPath".to_string(), diag.key_path.render().into());
    props.insert("consequence".to_string(), diag.consequence.code().into());
    props.insert("fixPattern".to_string(), diag.fix_pattern.code().into());
    if let Some(hint) = &diag.fix_hint {
        props.insert("fixHint".to_string(), hint.clone().into());
    }
    props
}

/// Builds the SARIF log structure for a report.
pub fn to_sarif(report: &Report) -> SarifLog {
    // One descriptor per distinct rule id, in sorted order.
    let mut rule_ids: Vec<&str> = report
        .diagnostics
        .iter()
        .map(|d| d.rule_id.as_str())
        .collect();
    rule_ids.sort_unstable();
    rule_ids.dedup();

    let rules: Vec<SarifRule> = rule_ids
        .iter()
        .map(|id| {
            let first = report
                .diagnostics
                .iter()
                .find(|d| d.rule_id == *id)
                .expect("id came from diagnostics");
            let mut props = BTreeMap::new();
            props.insert(
                "category".to_string(),
                serde_json::Value::from(first.category.to_string()),
            );
            SarifRule {
                id: id.to_string(),
                name: id.to_string(),
                short_description: SarifMessage {
                    text: first.category.to_string(),
                },
                default_configuration: SarifConfiguration {
                    level: first.severity.sarif_level().to_string(),
                },
                properties: Some(props),
            }
        })
        .collect();

    let index_of = |id: &str| rule_ids.iter().position(|r| *r == id).unwrap();

    let results: Vec<SarifResult> = report
        .diagnostics
        .iter()
        .map(|d| SarifResult {
            rule_id: d.rule_id.clone(),
            rule_index: index_of(&d.rule_id),
            level: d.severity.sarif_level().to_string(),
            message: SarifMessage {
                text: format!("{} (fix: {})", d.message, suggest_fix(d)),
            },
            locations: vec![SarifLocation {
                physical_location: SarifPhysicalLocation {
                    artifact_location: SarifArtifactLocation {
                        uri: d.location.file.to_string_lossy().replace('\\', "/"),
                    },
                    region: SarifRegion {
                        start_line: d.location.start_line,
                        start_column: d.location.start_col,
                        end_line: d.location.end_line,
                        end_column: d.location.end_col.max(d.location.start_col),
                    },
                },
            }],
            properties: Some(result_properties(d)),
        })
        .collect();

    SarifLog {
        schema: SARIF_SCHEMA_URI.to_string(),
        version: SARIF_VERSION.to_string(),
        runs: vec![SarifRun {
            tool: SarifTool {
                driver: SarifDriver {
                    name: report.tool_name.clone(),
                    version: report.tool_version.clone(),
                    rules,
                },
            },
            invocations: report.timestamp.as_ref().map(|ts| {
                vec![SarifInvocation {
                    execution_successful: true,
                    start_time_utc: Some(ts.clone()),
                }]
            }),
            column_kind: "unicodeCodePoints".to_string(),
            results,
        }],
    }
}

pub fn emit_sarif(report: &Report) -> Vec<u8> {
    let log = to_sarif(report);
    let mut bytes = serde_json::to_vec_pretty(&log).expect("sarif serializes");
    bytes.push(b'\n');
    bytes
}
