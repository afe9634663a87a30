//! Parsing of Kind scripts and Helm charts into [`ConfigDocument`]s.
//!
//! Helm templates are masked first (see [`mask`]) so they parse as plain
//! YAML; every span reported on a leaf refers to the original file text.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::model::{ConfigDocument, KeyPath, Leaf, ScriptKind, SourceSpan};

pub mod chart;
pub mod flat;
pub mod mask;
mod tree;

pub use chart::{load_chart, ChartError, ChartLoad, HelmChart};
pub use flat::{export_flat, import_flat, FlatLeaf, FlatRecord};
pub use mask::{mask_directives, DirectiveToken, MaskError, MaskOutcome};

/// A file that failed to parse. Surfaced as a diagnostic by the syntax
/// rule instead of aborting the scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntaxIssue {
    pub file: PathBuf,
    pub span: SourceSpan,
    pub detail: String,
}

/// Parses (pre-masked) YAML text into one document per `---` section.
///
/// Anchors and aliases are resolved during flattening; merge keys splice
/// their source entries with explicit keys winning; duplicate mapping keys
/// follow last-wins with the repeat recorded on the document. Empty
/// documents are skipped but keep their index slot.
pub fn parse_script(
    text: &str,
    file: &Path,
    script_kind: ScriptKind,
    mask: Option<&MaskOutcome>,
) -> Result<Vec<ConfigDocument>, SyntaxIssue> {
    let builder = tree::load_documents(text).map_err(|e| {
        let m = e.marker();
        SyntaxIssue {
            file: file.to_path_buf(),
            span: SourceSpan::point(file, m.line() as u32, m.col() as u32 + 1),
            detail: e.info().to_string(),
        }
    })?;

    if let Some((line, col)) = builder.undefined_alias {
        return Err(SyntaxIssue {
            file: file.to_path_buf(),
            span: SourceSpan::point(file, line, col),
            detail: "alias refers to an undefined anchor".to_string(),
        });
    }

    let ctx = tree::SpanContext::new(text, file, mask);
    let doc_starts: Vec<u32> = builder.docs.iter().map(|d| d.start_line).collect();

    let mut documents = Vec::new();
    for (doc_index, raw) in builder.docs.iter().enumerate() {
        let Some(root) = &raw.root else { continue };
        if tree::is_empty_root(root) {
            continue;
        }
        let flat = tree::flatten(root, &ctx);
        let leaves: Vec<Leaf> = flat
            .leaves
            .into_iter()
            .map(|(path, value, span)| Leaf { path, value, span })
            .collect();

        let directive_table = match mask {
            Some(m) => directives_for_doc(m, &doc_starts, doc_index),
            None => BTreeMap::new(),
        };

        let text_at = |path: &str| -> Option<String> {
            let parsed = KeyPath::parse(path).expect("static key path");
            leaves
                .iter()
                .find(|l| l.path == parsed)
                .filter(|l| !l.value.is_null())
                .map(|l| l.value.raw_text.clone())
        };

        documents.push(ConfigDocument {
            kind: text_at("kind"),
            api_version: text_at("apiVersion"),
            name: text_at("metadata.name"),
            namespace: text_at("metadata.namespace"),
            file: file.to_path_buf(),
            doc_index,
            script_kind,
            leaves,
            directive_table,
            duplicate_keys: flat.duplicate_keys,
        });
    }
    Ok(documents)
}

/// Attributes each directive token to the document whose line range
/// contains it. Tokens before the first document start belong to the
/// first document.
fn directives_for_doc(
    mask: &MaskOutcome,
    doc_starts: &[u32],
    doc_index: usize,
) -> BTreeMap<String, String> {
    let start = doc_starts[doc_index];
    let end = doc_starts.get(doc_index + 1).copied().unwrap_or(u32::MAX);
    mask.tokens
        .iter()
        .filter(|t| {
            let line = t.span.start_line;
            if doc_index == 0 {
                line < end
            } else {
                line >= start && line < end
            }
        })
        .map(|t| (t.id.clone(), t.original_text.clone()))
        .collect()
}

/// Parses one source file, masking template directives first when any are
/// present. This is the entry point used by the scanner.
pub fn parse_source(
    text: &str,
    file: &Path,
    script_kind: ScriptKind,
) -> Result<Vec<ConfigDocument>, SyntaxIssue> {
    if text.contains("{{") {
        let mask = mask_directives(text, file).map_err(|e| {
            let MaskError::UnbalancedDirective { line, col } = e;
            SyntaxIssue {
                file: file.to_path_buf(),
                span: SourceSpan::point(file, line, col),
                detail: "unbalanced template directive: no closing '}}'".to_string(),
            }
        })?;
        parse_script(&mask.masked_text, file, script_kind, Some(&mask))
    } else {
        parse_script(text, file, script_kind, None)
    }
}
