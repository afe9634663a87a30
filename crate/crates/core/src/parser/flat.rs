//! Flat export of parsed documents: one JSON record per document with the
//! full key/value leaf sequence. Re-importing an exported record and
//! exporting it again is byte-identical.

use serde::{Deserialize, Serialize};

use crate::model::ConfigDocument;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatLeaf {
    pub path: String,
    pub value: String,
    pub tag: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatRecord {
    pub file: String,
    pub doc_index: usize,
    pub script_kind: String,
    pub leaves: Vec<FlatLeaf>,
}

/// Flattened view of one document, leaves in source order.
pub fn export_flat(doc: &ConfigDocument) -> FlatRecord {
    FlatRecord {
        file: doc.file.to_string_lossy().replace('\\', "/"),
        doc_index: doc.doc_index,
        script_kind: doc.script_kind.name().to_string(),
        leaves: doc
            .leaves
            .iter()
            .map(|l| FlatLeaf {
                path: l.path.render(),
                value: l.value.raw_text.clone(),
                tag: l.value.tag.name().to_string(),
                line: l.span.start_line,
            })
            .collect(),
    }
}

impl FlatRecord {
    /// Compact single-line JSON form, suitable for newline-delimited output.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("flat record serializes")
    }
}

/// Parses one exported record back.
pub fn import_flat(json: &str) -> Result<FlatRecord, serde_json::Error> {
    serde_json::from_str(json)
}
