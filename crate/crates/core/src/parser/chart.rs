//! Helm chart loading: `values.yaml` plus every template under
//! `templates/`, with directive masking applied to the templates.

use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::model::{ConfigDocument, ScriptKind};
use crate::parser::{parse_source, SyntaxIssue};

/// A loaded Helm chart.
#[derive(Debug, Clone)]
pub struct HelmChart {
    pub root: PathBuf,
    pub values_doc: Option<ConfigDocument>,
    pub templates: Vec<ConfigDocument>,
}

#[derive(Debug, thiserror::Error)]
pub enum ChartError {
    #[error("chart root is not a directory: {0}")]
    NotADirectory(PathBuf),
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// A chart together with the parse failures encountered while loading it.
/// Failures are not fatal; they surface as syntax diagnostics.
#[derive(Debug)]
pub struct ChartLoad {
    pub chart: HelmChart,
    pub failures: Vec<SyntaxIssue>,
}

/// Loads a chart rooted at `root`. File paths recorded on the documents
/// keep `root` as given, so callers that pass scan-relative roots get
/// scan-relative document paths.
///
/// When `read_root` is `Some`, files are read from `read_root` joined with
/// the recorded path instead; the scanner uses this to keep reports
/// relative while reading from an absolute location.
pub fn load_chart_from(root: &Path, read_root: Option<&Path>) -> Result<ChartLoad, ChartError> {
    let resolve = |p: &Path| -> PathBuf {
        match read_root {
            Some(base) => base.join(p),
            None => p.to_path_buf(),
        }
    };
    if !resolve(root).is_dir() {
        return Err(ChartError::NotADirectory(root.to_path_buf()));
    }

    let mut failures = Vec::new();
    let mut values_doc = None;

    for name in ["values.yaml", "values.yml"] {
        let rel = root.join(name);
        let abs = resolve(&rel);
        if abs.is_file() {
            let text = std::fs::read_to_string(&abs).map_err(|source| ChartError::Io {
                path: abs.clone(),
                source,
            })?;
            match parse_source(&text, &rel, ScriptKind::HelmValues) {
                Ok(docs) => values_doc = docs.into_iter().next(),
                Err(issue) => failures.push(issue),
            }
            break;
        }
    }

    let mut templates = Vec::new();
    let templates_dir = resolve(&root.join("templates"));
    if templates_dir.is_dir() {
        let mut files: Vec<PathBuf> = WalkDir::new(&templates_dir)
            .into_iter()
            .filter_map(Result::ok)
            .filter(|e| e.file_type().is_file())
            .map(|e| e.into_path())
            .filter(|p| {
                matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("yaml") | Some("yml")
                )
            })
            .collect();
        files.sort();
        for abs in files {
            let rel = match read_root {
                Some(base) => abs.strip_prefix(base).unwrap_or(&abs).to_path_buf(),
                None => abs.clone(),
            };
            let text = std::fs::read_to_string(&abs).map_err(|source| ChartError::Io {
                path: abs.clone(),
                source,
            })?;
            match parse_source(&text, &rel, ScriptKind::HelmTemplate) {
                Ok(docs) => templates.extend(docs),
                Err(issue) => failures.push(issue),
            }
        }
    }

    Ok(ChartLoad {
        chart: HelmChart {
            root: root.to_path_buf(),
            values_doc,
            templates,
        },
        failures,
    })
}

/// Loads a chart rooted at `root`, reading files directly at that path.
pub fn load_chart(root: &Path) -> Result<ChartLoad, ChartError> {
    load_chart_from(root, None)
}
