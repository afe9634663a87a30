//! Corpus assembly: all parsed documents under a scan root, chart
//! membership, parse failures, and the cross-document reference graph.

use std::path::PathBuf;

use crate::model::{ConfigDocument, KeyPath};
use crate::parser::{HelmChart, SyntaxIssue};
use crate::rules::graph::ReferenceGraph;

/// Everything the rules run over.
#[derive(Debug)]
pub struct Corpus {
    pub scan_root: PathBuf,
    pub standalone: Vec<ConfigDocument>,
    pub charts: Vec<HelmChart>,
    pub failures: Vec<SyntaxIssue>,
    pub graph: ReferenceGraph,
}

impl Corpus {
    /// Sorts all inputs deterministically, then builds the reference graph,
    /// so the corpus is a pure function of the file set regardless of the
    /// order workers produced it in.
    pub fn assemble(
        scan_root: impl Into<PathBuf>,
        mut standalone: Vec<ConfigDocument>,
        mut charts: Vec<HelmChart>,
        mut failures: Vec<SyntaxIssue>,
    ) -> Self {
        standalone.sort_by(|a, b| (&a.file, a.doc_index).cmp(&(&b.file, b.doc_index)));
        charts.sort_by(|a, b| a.root.cmp(&b.root));
        for chart in &mut charts {
            chart
                .templates
                .sort_by(|a, b| (&a.file, a.doc_index).cmp(&(&b.file, b.doc_index)));
        }
        failures.sort_by(|a, b| (&a.file, &a.span).cmp(&(&b.file, &b.span)));

        let mut corpus = Self {
            scan_root: scan_root.into(),
            standalone,
            charts,
            failures,
            graph: ReferenceGraph::default(),
        };
        corpus.graph = ReferenceGraph::build(corpus.documents());
        corpus
    }

    /// Every document in deterministic order: standalone scripts first,
    /// then each chart's values file and templates.
    pub fn documents(&self) -> impl Iterator<Item = &ConfigDocument> {
        self.standalone.iter().chain(self.charts.iter().flat_map(|c| {
            c.values_doc.iter().chain(c.templates.iter())
        }))
    }

    pub fn document_count(&self) -> usize {
        self.documents().count()
    }

    /// The chart owning `doc`, if any, determined by path prefix.
    pub fn chart_for(&self, doc: &ConfigDocument) -> Option<&HelmChart> {
        self.charts
            .iter()
            .filter(|c| doc.file.starts_with(&c.root))
            .max_by_key(|c| c.root.components().count())
    }
}

/// Paths at which a pod specification lives for the given object kind.
pub fn pod_spec_paths(kind: &str) -> Vec<KeyPath> {
    match kind {
        "Pod" => vec![KeyPath::from_keys(["spec"])],
        "Deployment" | "StatefulSet" | "DaemonSet" | "Job" | "ReplicaSet" => {
            vec![KeyPath::from_keys(["spec", "template", "spec"])]
        }
        "CronJob" => vec![KeyPath::from_keys([
            "spec",
            "jobTemplate",
            "spec",
            "template",
            "spec",
        ])],
        _ => Vec::new(),
    }
}

/// Pod-spec paths of a document that actually have content beneath them.
pub fn present_pod_specs(doc: &ConfigDocument) -> Vec<KeyPath> {
    let Some(kind) = doc.kind.as_deref() else {
        return Vec::new();
    };
    pod_spec_paths(kind)
        .into_iter()
        .filter(|p| doc.leaves_under(p).next().is_some())
        .collect()
}

/// Container indices under a pod-spec path (the `containers` list).
pub fn container_indices(doc: &ConfigDocument, pod_spec: &KeyPath) -> Vec<usize> {
    let containers = pod_spec.child_key("containers");
    let mut seen = Vec::new();
    for leaf in doc.leaves_under(&containers) {
        if let Some(crate::model::KeySegment::Index(i)) =
            leaf.path.segments().get(containers.segments().len())
        {
            if !seen.contains(i) {
                seen.push(*i);
            }
        }
    }
    seen.sort_unstable();
    seen
}
