//! Hard-coded configuration values in Helm templates.
//!
//! A template leaf whose terminal key is in the configurable-key set and
//! whose value carries no directive is flagged: user-provided values can
//! never reach it. The literal form of the check would flag every
//! hard-coded leaf in a template; the key allowlist keeps it to the keys
//! that are conventionally chart parameters, and is user-extensible.

use crate::model::{ConfigDocument, Diagnostic, KeyPath, ScalarValue, Severity};
use crate::parser::{DirectiveToken, HelmChart};
use crate::rules::config::RuleConfig;
use crate::rules::corpus::Corpus;
use crate::taxonomy::{default_consequence, default_fix_pattern, Category};

pub const RULE_ID: &str = "INCORRECT_HELMING";

/// A document counts as a template when it sits under a chart's
/// `templates/` directory or contains at least one template directive.
pub fn is_template(doc: &ConfigDocument) -> bool {
    doc.script_kind == crate::model::ScriptKind::HelmTemplate || doc.has_directives()
}

/// A value is hard-coded when no directive placeholder is embedded in it
/// and it is not null. Partially templated values are not hard-coded.
pub fn is_hard_coded(value: &ScalarValue) -> bool {
    value.directive_ids.is_empty() && !value.is_null()
}

/// Resolves a `.Values.*` directive against a chart's values file.
///
/// Trailing pipeline stages consisting of a bare function name (`| quote`,
/// `| b64enc`) are stripped before lookup; any other shape — arguments,
/// nested calls, non-Values expressions — makes the result absent.
pub fn resolve_directive(token: &DirectiveToken, chart: &HelmChart) -> Option<ScalarValue> {
    let body = token
        .original_text
        .trim_start_matches("{{-")
        .trim_start_matches("{{")
        .trim_end_matches("-}}")
        .trim_end_matches("}}")
        .trim();
    let mut stages = body.split('|');
    let head = stages.next()?.trim();
    for stage in stages {
        let stage = stage.trim();
        let plain_ident = !stage.is_empty()
            && stage
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !plain_ident {
            return None;
        }
    }
    let path_text = head.strip_prefix(".Values.")?;
    if path_text.is_empty() || path_text.chars().any(|c| c.is_whitespace() || c == '(') {
        return None;
    }
    let path = KeyPath::from_keys(path_text.split('.'));
    let values = chart.values_doc.as_ref()?;
    values.leaf(&path).map(|l| l.value.clone())
}

pub fn check_incorrect_helming(corpus: &Corpus, config: &RuleConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for doc in corpus.documents() {
        if !is_template(doc) || doc.script_kind == crate::model::ScriptKind::HelmValues {
            continue;
        }
        for leaf in &doc.leaves {
            let Some(key) = leaf.path.terminal_key() else {
                continue;
            };
            if !config.configurable_keys.contains(key) || !is_hard_coded(&leaf.value) {
                continue;
            }
            let hint = format!(
                "replace the value with a template directive, e.g. `{}: {{{{ .Values.{} }}}}`",
                key,
                values_path_suggestion(doc, key)
            );
            out.push(Diagnostic {
                rule_id: RULE_ID.to_string(),
                category: Category::IncorrectHelming.into(),
                severity: Severity::Error,
                location: leaf.span.clone(),
                key_path: leaf.path.clone(),
                message: format!(
                    "configuration value for key '{}' is hard-coded in a template; \
                     user-provided values will never be applied",
                    key
                ),
                consequence: default_consequence(Category::IncorrectHelming),
                fix_pattern: default_fix_pattern(Category::IncorrectHelming),
                fix_hint: Some(hint),
            });
        }
    }
    out
}

/// Chart-local values path suggested in the fix hint, derived from the
/// template file stem.
fn values_path_suggestion(doc: &ConfigDocument, key: &str) -> String {
    let stem = doc
        .file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem: String = stem
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if stem.is_empty() {
        key.to_string()
    } else {
        format!("{stem}.{key}")
    }
}
