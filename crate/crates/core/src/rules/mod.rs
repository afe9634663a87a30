//! Rule matching over a corpus: the built-in registry, configuration, and
//! the evaluation driver.

pub mod config;
pub mod corpus;
pub mod graph;
pub mod helming;
pub mod orphanism;
pub mod pack;

pub use config::{ConfigError, DeprecatedApi, RuleConfig, DEFAULT_CONFIGURABLE_KEYS};
pub use corpus::Corpus;
pub use graph::{build_reference_graph, Declaration, RefEdge, ReferenceGraph, ResourceKey, TrackedKind};
pub use helming::{check_incorrect_helming, is_hard_coded, is_template, resolve_directive};
pub use orphanism::check_orphanism;

use crate::model::Diagnostic;
use crate::taxonomy::{Category, DefectCategory, SubCategory};

type CheckFn = fn(&Corpus, &RuleConfig) -> Vec<Diagnostic>;

/// One registered rule.
pub struct Rule {
    pub id: &'static str,
    pub category: DefectCategory,
    pub description: &'static str,
    pub enabled_by_default: bool,
    check: CheckFn,
}

/// The rule set evaluated over a corpus.
pub struct RuleRegistry {
    rules: Vec<Rule>,
}

impl RuleRegistry {
    /// All built-in rules.
    pub fn builtin() -> Self {
        fn cat(c: Category) -> DefectCategory {
            c.into()
        }
        fn catsub(c: Category, s: SubCategory) -> DefectCategory {
            DefectCategory::with_sub(c, s).expect("static pair")
        }
        let rules = vec![
            Rule {
                id: helming::RULE_ID,
                category: cat(Category::IncorrectHelming),
                description: "configuration value hard-coded in a Helm template",
                enabled_by_default: true,
                check: helming::check_incorrect_helming,
            },
            Rule {
                id: orphanism::RULE_ID,
                category: cat(Category::Orphanism),
                description: "resource declared but unreferenced, or referenced but not declared",
                enabled_by_default: true,
                check: orphanism::check_orphanism,
            },
            Rule {
                id: pack::VERSION_INCOMPAT,
                category: cat(Category::VersionIncompatibility),
                description: "apiVersion deprecated for the object kind",
                enabled_by_default: true,
                check: pack::check_version_incompat,
            },
            Rule {
                id: pack::NAME_TOO_LONG,
                category: catsub(Category::DataFields, SubCategory::Vr),
                description: "object name exceeds the 63-character limit",
                enabled_by_default: true,
                check: pack::check_name_too_long,
            },
            Rule {
                id: pack::SYNTAX,
                category: catsub(Category::DataFields, SubCategory::Syntax),
                description: "YAML parse error or duplicate mapping key",
                enabled_by_default: true,
                check: pack::check_syntax,
            },
            Rule {
                id: pack::PRIVILEGED_PORT,
                category: catsub(Category::Security, SubCategory::Pp),
                description: "privileged port below 1024",
                enabled_by_default: true,
                check: pack::check_privileged_port,
            },
            Rule {
                id: pack::WILDCARD_RBAC,
                category: catsub(Category::Security, SubCategory::Ac),
                description: "wildcard in RBAC apiGroups, resources, or verbs",
                enabled_by_default: true,
                check: pack::check_wildcard_rbac,
            },
            Rule {
                id: pack::MISSING_SECURITY_CONTEXT,
                category: catsub(Category::Security, SubCategory::Sc),
                description: "securityContext does not pin a non-root user",
                enabled_by_default: true,
                check: pack::check_missing_security_context,
            },
            Rule {
                id: pack::MISSING_LIVENESS_PROBE,
                category: cat(Category::Probing),
                description: "container without a liveness probe",
                enabled_by_default: true,
                check: pack::check_missing_liveness_probe,
            },
        ];
        Self { rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }
}

/// A rule that failed to evaluate. Reported as a tool error, never as a
/// diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleFailure {
    pub rule_id: String,
    pub message: String,
}

/// Result of evaluating a registry over a corpus.
#[derive(Debug, Default)]
pub struct RuleRunOutcome {
    pub diagnostics: Vec<Diagnostic>,
    pub failures: Vec<RuleFailure>,
}

/// Evaluates every enabled rule. Output is deduplicated on
/// (rule id, file, key path, line) and sorted by (file, line, rule id), so
/// it is identical across runs and evaluation orders. A panicking rule is
/// contained and reported as a tool error.
pub fn run_rules(corpus: &Corpus, registry: &RuleRegistry, config: &RuleConfig) -> RuleRunOutcome {
    let mut outcome = RuleRunOutcome::default();
    for rule in registry.rules() {
        if !config.is_enabled(rule.id, rule.enabled_by_default) {
            continue;
        }
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            (rule.check)(corpus, config)
        }));
        match result {
            Ok(mut diags) => {
                if let Some(severity) = config.severity_override(rule.id) {
                    for d in &mut diags {
                        d.severity = severity;
                    }
                }
                outcome.diagnostics.extend(diags);
            }
            Err(panic) => {
                let message = panic
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| panic.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "rule panicked".to_string());
                outcome.failures.push(RuleFailure {
                    rule_id: rule.id.to_string(),
                    message,
                });
            }
        }
    }

    outcome.diagnostics.sort_by(|a, b| {
        (
            &a.location.file,
            a.location.start_line,
            &a.rule_id,
            a.location.start_col,
            &a.key_path,
        )
            .cmp(&(
                &b.location.file,
                b.location.start_line,
                &b.rule_id,
                b.location.start_col,
                &b.key_path,
            ))
    });
    outcome.diagnostics.dedup_by(|a, b| {
        a.rule_id == b.rule_id
            && a.location.file == b.location.file
            && a.key_path == b.key_path
            && a.location.start_line == b.location.start_line
    });
    outcome
}
