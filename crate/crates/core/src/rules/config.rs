//! Rule configuration: enable/disable rules, severity overrides, the
//! configurable-key set for the hard-coding check, and the deprecated-API
//! table. Loaded from a YAML file; everything has built-in defaults.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::model::Severity;

/// Keys whose hard-coded values inside a template are flagged by default.
pub const DEFAULT_CONFIGURABLE_KEYS: [&str; 7] = [
    "image",
    "mountPath",
    "namespace",
    "tag",
    "repository",
    "storageClassName",
    "host",
];

/// One row of the deprecated-API table.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct DeprecatedApi {
    pub kind: String,
    pub old: String,
    pub new: String,
}

/// Built-in deprecated-API entries. The table is data, not code, because
/// it has to evolve with Kubernetes releases; config files can extend it.
pub fn builtin_deprecated_apis() -> Vec<DeprecatedApi> {
    let apps = ["Deployment", "DaemonSet", "ReplicaSet"];
    let mut table: Vec<DeprecatedApi> = apps
        .iter()
        .map(|kind| DeprecatedApi {
            kind: kind.to_string(),
            old: "extensions/v1beta1".to_string(),
            new: "apps/v1".to_string(),
        })
        .collect();
    table.push(DeprecatedApi {
        kind: "Ingress".to_string(),
        old: "extensions/v1beta1".to_string(),
        new: "networking.k8s.io/v1".to_string(),
    });
    table
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleToggle {
    enabled: Option<bool>,
    severity: Option<Severity>,
}

/// On-disk configuration format.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleConfigFile {
    /// Per-rule settings keyed by rule id.
    #[serde(default)]
    rules: BTreeMap<String, RuleToggle>,
    /// Replaces the built-in configurable-key set entirely.
    #[serde(default)]
    configurable_keys: Option<Vec<String>>,
    /// Additional keys merged into the configurable-key set.
    #[serde(default)]
    extra_configurable_keys: Vec<String>,
    /// Additional deprecated-API rows merged into the built-in table.
    #[serde(default)]
    extra_deprecated_apis: Vec<DeprecatedApi>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("failed to read rule config {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("invalid rule config {path}: {source}")]
    Parse {
        path: std::path::PathBuf,
        source: serde_yaml::Error,
    },
}

/// Fully resolved configuration handed to the rules.
#[derive(Debug, Clone)]
pub struct RuleConfig {
    enabled_overrides: BTreeMap<String, bool>,
    severity_overrides: BTreeMap<String, Severity>,
    pub configurable_keys: BTreeSet<String>,
    pub deprecated_apis: Vec<DeprecatedApi>,
}

impl Default for RuleConfig {
    fn default() -> Self {
        Self {
            enabled_overrides: BTreeMap::new(),
            severity_overrides: BTreeMap::new(),
            configurable_keys: DEFAULT_CONFIGURABLE_KEYS
                .iter()
                .map(|k| k.to_string())
                .collect(),
            deprecated_apis: builtin_deprecated_apis(),
        }
    }
}

impl RuleConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file: RuleConfigFile =
            serde_yaml::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(Self::from_parsed(file))
    }

    fn from_parsed(file: RuleConfigFile) -> Self {
        let mut cfg = RuleConfig::default();
        if let Some(replacement) = file.configurable_keys {
            cfg.configurable_keys = replacement.into_iter().collect();
        }
        cfg.configurable_keys.extend(file.extra_configurable_keys);
        cfg.deprecated_apis.extend(file.extra_deprecated_apis);
        for (id, toggle) in file.rules {
            if let Some(enabled) = toggle.enabled {
                cfg.enabled_overrides.insert(id.clone(), enabled);
            }
            if let Some(severity) = toggle.severity {
                cfg.severity_overrides.insert(id, severity);
            }
        }
        cfg
    }

    /// Programmatic enable/disable, used by embedders and tests.
    pub fn set_enabled(&mut self, rule_id: &str, enabled: bool) {
        self.enabled_overrides.insert(rule_id.to_string(), enabled);
    }

    pub fn set_severity(&mut self, rule_id: &str, severity: Severity) {
        self.severity_overrides.insert(rule_id.to_string(), severity);
    }

    pub fn is_enabled(&self, rule_id: &str, default: bool) -> bool {
        self.enabled_overrides.get(rule_id).copied().unwrap_or(default)
    }

    pub fn severity_override(&self, rule_id: &str) -> Option<Severity> {
        self.severity_overrides.get(rule_id).copied()
    }

    pub fn deprecated_replacement(&self, kind: &str, api_version: &str) -> Option<&str> {
        self.deprecated_apis
            .iter()
            .find(|e| e.kind == kind && e.old == api_version)
            .map(|e| e.new.as_str())
    }
}
