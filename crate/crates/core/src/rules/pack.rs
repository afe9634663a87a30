//! The extended rule pack: statically detectable defects beyond hard-coded
//! template values and orphaned resources.

use crate::model::{ConfigDocument, Diagnostic, KeyPath, Leaf, Severity, SourceSpan};
use crate::rules::config::RuleConfig;
use crate::rules::corpus::{container_indices, present_pod_specs, Corpus};
use crate::taxonomy::{
    default_consequence, default_fix_pattern, Category, DefectCategory, FixPattern, SubCategory,
};

pub const VERSION_INCOMPAT: &str = "VERSION_INCOMPAT";
pub const NAME_TOO_LONG: &str = "NAME_TOO_LONG";
pub const SYNTAX: &str = "SYNTAX";
pub const PRIVILEGED_PORT: &str = "PRIVILEGED_PORT";
pub const WILDCARD_RBAC: &str = "WILDCARD_RBAC";
pub const MISSING_SECURITY_CONTEXT: &str = "MISSING_SECURITY_CONTEXT";
pub const MISSING_LIVENESS_PROBE: &str = "MISSING_LIVENESS_PROBE";

/// Longest name the API server accepts for most objects.
const MAX_NAME_LENGTH: usize = 63;

/// Ports below this bound need elevated privileges to bind.
const PRIVILEGED_PORT_BOUND: i64 = 1024;

fn sub(category: Category, sub: SubCategory) -> DefectCategory {
    DefectCategory::with_sub(category, sub).expect("static category pair")
}

/// Deprecated `apiVersion` for the document's kind.
pub fn check_version_incompat(corpus: &Corpus, config: &RuleConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for doc in corpus.documents() {
        let Some(kind) = doc.kind.as_deref() else { continue };
        let Some(leaf) = doc.leaf_at("apiVersion") else { continue };
        if leaf.value.has_directives() {
            continue;
        }
        let api = leaf.value.raw_text.as_str();
        let Some(replacement) = config.deprecated_replacement(kind, api) else {
            continue;
        };
        out.push(Diagnostic {
            rule_id: VERSION_INCOMPAT.to_string(),
            category: Category::VersionIncompatibility.into(),
            severity: Severity::Error,
            location: leaf.span.clone(),
            key_path: leaf.path.clone(),
            message: format!("apiVersion '{api}' is deprecated for kind {kind}"),
            consequence: default_consequence(Category::VersionIncompatibility),
            fix_pattern: default_fix_pattern(Category::VersionIncompatibility),
            fix_hint: Some(replacement.to_string()),
        });
    }
    out
}

/// Object names longer than the 63-character limit.
pub fn check_name_too_long(corpus: &Corpus, _config: &RuleConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for doc in corpus.documents() {
        for path in ["metadata.name", "metadata.generateName"] {
            let Some(leaf) = doc.leaf_at(path) else { continue };
            if leaf.value.has_directives() {
                continue;
            }
            let len = leaf.value.raw_text.chars().count();
            if len <= MAX_NAME_LENGTH {
                continue;
            }
            out.push(Diagnostic {
                rule_id: NAME_TOO_LONG.to_string(),
                category: sub(Category::DataFields, SubCategory::Vr),
                severity: Severity::Error,
                location: leaf.span.clone(),
                key_path: leaf.path.clone(),
                message: format!(
                    "name is {len} characters long and exceeds the maximum length of \
                     {MAX_NAME_LENGTH} characters"
                ),
                consequence: default_consequence(Category::DataFields),
                // Renaming is a value change, not a syntax repair.
                fix_pattern: FixPattern::ConfigurationValueChanges,
                fix_hint: Some(format!("shorten the name to at most {MAX_NAME_LENGTH} characters")),
            });
        }
    }
    out
}

/// Parse failures and duplicate mapping keys, surfaced as diagnostics.
pub fn check_syntax(corpus: &Corpus, _config: &RuleConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for failure in &corpus.failures {
        out.push(Diagnostic {
            rule_id: SYNTAX.to_string(),
            category: sub(Category::DataFields, SubCategory::Syntax),
            severity: Severity::Error,
            location: failure.span.clone(),
            key_path: KeyPath::root(),
            message: format!("YAML parse error: {}", failure.detail),
            consequence: default_consequence(Category::DataFields),
            fix_pattern: default_fix_pattern(Category::DataFields),
            fix_hint: None,
        });
    }
    for doc in corpus.documents() {
        for (path, span) in &doc.duplicate_keys {
            out.push(Diagnostic {
                rule_id: SYNTAX.to_string(),
                category: sub(Category::DataFields, SubCategory::Syntax),
                severity: Severity::Warning,
                location: span.clone(),
                key_path: path.clone(),
                message: format!(
                    "duplicate mapping key '{}'; the last occurrence wins",
                    path.terminal_key().unwrap_or("?")
                ),
                consequence: default_consequence(Category::DataFields),
                fix_pattern: default_fix_pattern(Category::DataFields),
                fix_hint: None,
            });
        }
    }
    out
}

/// Privileged container ports and `--secure-port` arguments below 1024.
pub fn check_privileged_port(corpus: &Corpus, _config: &RuleConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |leaf: &Leaf, message: String| {
        out.push(Diagnostic {
            rule_id: PRIVILEGED_PORT.to_string(),
            category: sub(Category::Security, SubCategory::Pp),
            severity: Severity::Warning,
            location: leaf.span.clone(),
            key_path: leaf.path.clone(),
            message,
            consequence: default_consequence(Category::Security),
            fix_pattern: FixPattern::ConfigurationValueChanges,
            fix_hint: Some(format!("use an unprivileged port (>= {PRIVILEGED_PORT_BOUND})")),
        });
    };
    for doc in corpus.documents() {
        for leaf in &doc.leaves {
            match leaf.path.terminal_key() {
                Some("containerPort") => {
                    if let Some(port) = leaf.value.as_i64() {
                        if port > 0 && port < PRIVILEGED_PORT_BOUND {
                            push(leaf, format!("containerPort {port} is a privileged port"));
                        }
                    }
                }
                Some("args") | Some("command") => {
                    let Some(rest) = leaf.value.raw_text.strip_prefix("--secure-port=") else {
                        continue;
                    };
                    if leaf.value.has_directives() {
                        continue;
                    }
                    if let Ok(port) = rest.trim().parse::<i64>() {
                        if port > 0 && port < PRIVILEGED_PORT_BOUND {
                            push(
                                leaf,
                                format!("--secure-port={port} uses a privileged port"),
                            );
                        }
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// `*` in Role/ClusterRole apiGroups, resources, or verbs.
pub fn check_wildcard_rbac(corpus: &Corpus, _config: &RuleConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for doc in corpus.documents() {
        if !matches!(doc.kind.as_deref(), Some("Role") | Some("ClusterRole")) {
            continue;
        }
        let rules_prefix = KeyPath::from_keys(["rules"]);
        for leaf in doc.leaves_under(&rules_prefix) {
            if leaf.value.raw_text != "*" {
                continue;
            }
            let Some(field) = leaf.path.terminal_key() else { continue };
            if !matches!(field, "apiGroups" | "resources" | "verbs") {
                continue;
            }
            out.push(Diagnostic {
                rule_id: WILDCARD_RBAC.to_string(),
                category: sub(Category::Security, SubCategory::Ac),
                severity: Severity::Warning,
                location: leaf.span.clone(),
                key_path: leaf.path.clone(),
                message: format!(
                    "wildcard '*' in {field} grants access beyond what the object needs"
                ),
                consequence: default_consequence(Category::Security),
                fix_pattern: default_fix_pattern(Category::Security),
                fix_hint: Some(format!("enumerate the required {field} explicitly")),
            });
        }
    }
    out
}

/// Pod specs with no `runAsUser`/`runAsNonRoot` anywhere in a security
/// context, at pod or container level.
pub fn check_missing_security_context(corpus: &Corpus, _config: &RuleConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for doc in corpus.documents() {
        for pod_spec in present_pod_specs(doc) {
            let pod_ctx = pod_spec.child_key("securityContext");
            let has_pod_level = doc.leaf(&pod_ctx.child_key("runAsUser")).is_some()
                || doc.leaf(&pod_ctx.child_key("runAsNonRoot")).is_some();
            let has_container_level = container_indices(doc, &pod_spec).iter().any(|&i| {
                let ctx = pod_spec
                    .child_key("containers")
                    .child_index(i)
                    .child_key("securityContext");
                doc.leaf(&ctx.child_key("runAsUser")).is_some()
                    || doc.leaf(&ctx.child_key("runAsNonRoot")).is_some()
            });
            if has_pod_level || has_container_level {
                continue;
            }
            let location = anchor_span(doc, &pod_spec);
            out.push(Diagnostic {
                rule_id: MISSING_SECURITY_CONTEXT.to_string(),
                category: sub(Category::Security, SubCategory::Sc),
                severity: Severity::Warning,
                location,
                key_path: pod_ctx,
                message: "securityContext sets neither runAsUser nor runAsNonRoot; \
                          containers run as root by default"
                    .to_string(),
                consequence: default_consequence(Category::Security),
                // The repair adds properties rather than touching RBAC rules.
                fix_pattern: FixPattern::PropertyModification,
                fix_hint: Some(
                    "add securityContext.runAsNonRoot: true and a non-zero runAsUser".to_string(),
                ),
            });
        }
    }
    out
}

/// Containers without a liveness probe.
pub fn check_missing_liveness_probe(corpus: &Corpus, _config: &RuleConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for doc in corpus.documents() {
        for pod_spec in present_pod_specs(doc) {
            for i in container_indices(doc, &pod_spec) {
                let container = pod_spec.child_key("containers").child_index(i);
                let probe = container.child_key("livenessProbe");
                if doc.leaves_under(&probe).next().is_some() {
                    continue;
                }
                let name = doc
                    .leaf(&container.child_key("name"))
                    .map(|l| l.value.raw_text.clone())
                    .unwrap_or_else(|| format!("#{i}"));
                let location = anchor_span(doc, &container);
                out.push(Diagnostic {
                    rule_id: MISSING_LIVENESS_PROBE.to_string(),
                    category: Category::Probing.into(),
                    severity: Severity::Warning,
                    location,
                    key_path: probe,
                    message: format!(
                        "container '{name}' has no livenessProbe; failed containers \
                         will not recover automatically"
                    ),
                    consequence: default_consequence(Category::Probing),
                    fix_pattern: default_fix_pattern(Category::Probing),
                    fix_hint: None,
                });
            }
        }
    }
    out
}

/// Span of the first leaf under `prefix`, used to anchor reports about
/// something that is absent.
fn anchor_span(doc: &ConfigDocument, prefix: &KeyPath) -> SourceSpan {
    doc.leaves_under(prefix)
        .next()
        .map(|l| l.span.clone())
        .or_else(|| doc.leaves.first().map(|l| l.span.clone()))
        .unwrap_or_else(|| SourceSpan::point(&doc.file, 1, 1))
}
