//! Orphaned resources: tracked-kind declarations that nothing references,
//! and references whose target declaration does not exist.
//!
//! Declarations or references whose name carries a template placeholder are
//! skipped — those values are supplied by chart users, so flagging them
//! reproduces exactly the false positives practitioners reject.

use std::collections::BTreeSet;

use crate::model::{Diagnostic, Severity};
use crate::rules::config::RuleConfig;
use crate::rules::corpus::Corpus;
use crate::taxonomy::{default_consequence, default_fix_pattern, Category};

pub const RULE_ID: &str = "ORPHANISM";

pub fn check_orphanism(corpus: &Corpus, _config: &RuleConfig) -> Vec<Diagnostic> {
    let graph = &corpus.graph;
    let referenced: BTreeSet<_> = graph.references.iter().map(|e| &e.target).collect();
    let declared = graph.declared_keys();

    let mut out = Vec::new();

    // Declared but never referenced. Informational: the resource sits idle
    // and consumes cluster resources, but nothing is broken outright.
    for decl in &graph.declarations {
        if !referenced.contains(&decl.key) {
            out.push(Diagnostic {
                rule_id: RULE_ID.to_string(),
                category: Category::Orphanism.into(),
                severity: Severity::Info,
                location: decl.span.clone(),
                key_path: decl.name_path.clone(),
                message: format!("{} is declared but never referenced", decl.key),
                consequence: default_consequence(Category::Orphanism),
                fix_pattern: default_fix_pattern(Category::Orphanism),
                fix_hint: None,
            });
        }
    }

    // References to a declaration that does not exist. These break the
    // referencing object at apply time, hence error severity.
    for edge in &graph.references {
        if !declared.contains(&edge.target) {
            out.push(Diagnostic {
                rule_id: RULE_ID.to_string(),
                category: Category::Orphanism.into(),
                severity: Severity::Error,
                location: edge.span.clone(),
                key_path: edge.key_path.clone(),
                message: format!("reference to {} which is not declared", edge.target),
                consequence: default_consequence(Category::Orphanism),
                fix_pattern: default_fix_pattern(Category::Orphanism),
                fix_hint: Some(format!(
                    "declare {}/{} or remove the reference",
                    edge.target.kind, edge.target.name
                )),
            });
        }
    }

    out
}
