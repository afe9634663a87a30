//! The cross-document reference graph over tracked resource kinds.
//!
//! Declarations are resources of a tracked kind; reference edges come from
//! a fixed catalog of referencing fields (role bindings, service account
//! usage, storage class and volume wiring). Names that embed template
//! placeholders never become graph nodes — their value is supplied by
//! users at install time, so nothing static can be said about them.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use crate::model::{ConfigDocument, KeyPath, Leaf, SourceSpan};
use crate::rules::corpus::present_pod_specs;

/// Resource kinds participating in orphanism analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrackedKind {
    ServiceAccount,
    ClusterRole,
    StorageClass,
    PersistentVolumeClaim,
    PersistentVolume,
    Role,
}

impl TrackedKind {
    pub const ALL: [TrackedKind; 6] = [
        TrackedKind::ServiceAccount,
        TrackedKind::ClusterRole,
        TrackedKind::StorageClass,
        TrackedKind::PersistentVolumeClaim,
        TrackedKind::PersistentVolume,
        TrackedKind::Role,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TrackedKind::ServiceAccount => "ServiceAccount",
            TrackedKind::ClusterRole => "ClusterRole",
            TrackedKind::StorageClass => "StorageClass",
            TrackedKind::PersistentVolumeClaim => "PersistentVolumeClaim",
            TrackedKind::PersistentVolume => "PersistentVolume",
            TrackedKind::Role => "Role",
        }
    }

    pub fn from_kind(kind: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == kind)
    }

    /// Namespaced kinds match within a namespace; the rest match globally.
    pub fn is_namespaced(self) -> bool {
        matches!(
            self,
            TrackedKind::ServiceAccount | TrackedKind::Role | TrackedKind::PersistentVolumeClaim
        )
    }
}

impl fmt::Display for TrackedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Identity of a resource: kind, name, and namespace for namespaced kinds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResourceKey {
    pub kind: TrackedKind,
    pub name: String,
    /// `None` for cluster-scoped kinds.
    pub namespace: Option<String>,
}

impl ResourceKey {
    fn new(kind: TrackedKind, name: &str, namespace: Option<&str>) -> Self {
        Self {
            kind,
            name: name.to_string(),
            namespace: if kind.is_namespaced() {
                Some(namespace.unwrap_or("default").to_string())
            } else {
                None
            },
        }
    }
}

impl fmt::Display for ResourceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.namespace {
            Some(ns) => write!(f, "{}/{} (namespace {})", self.kind, self.name, ns),
            None => write!(f, "{}/{}", self.kind, self.name),
        }
    }
}

/// A declaration site of a tracked resource.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub key: ResourceKey,
    pub file: PathBuf,
    pub name_path: KeyPath,
    pub span: SourceSpan,
}

/// One reference edge, located at the referencing leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefEdge {
    pub target: ResourceKey,
    pub file: PathBuf,
    pub key_path: KeyPath,
    pub span: SourceSpan,
}

#[derive(Debug, Default)]
pub struct ReferenceGraph {
    pub declarations: Vec<Declaration>,
    pub references: Vec<RefEdge>,
}

impl ReferenceGraph {
    pub fn build<'a>(documents: impl Iterator<Item = &'a ConfigDocument>) -> Self {
        let mut graph = ReferenceGraph::default();
        for doc in documents {
            graph.collect_declaration(doc);
            graph.collect_references(doc);
        }
        graph
    }

    /// True when at least one edge targets `key`.
    pub fn is_referenced(&self, key: &ResourceKey) -> bool {
        self.references.iter().any(|e| &e.target == key)
    }

    /// True when a declaration for `key` exists.
    pub fn declaration_exists(&self, key: &ResourceKey) -> bool {
        self.declarations.iter().any(|d| &d.key == key)
    }

    pub fn declared_keys(&self) -> BTreeSet<&ResourceKey> {
        self.declarations.iter().map(|d| &d.key).collect()
    }

    fn collect_declaration(&mut self, doc: &ConfigDocument) {
        let Some(kind) = doc.kind.as_deref().and_then(TrackedKind::from_kind) else {
            return;
        };
        let Some(name_leaf) = doc.leaf_at("metadata.name") else {
            return;
        };
        if name_leaf.value.has_directives() || name_leaf.value.is_null() {
            return;
        }
        if kind.is_namespaced() && namespace_has_directives(doc) {
            return;
        }
        self.declarations.push(Declaration {
            key: ResourceKey::new(kind, &name_leaf.value.raw_text, doc_namespace(doc)),
            file: doc.file.clone(),
            name_path: name_leaf.path.clone(),
            span: name_leaf.span.clone(),
        });
    }

    fn collect_references(&mut self, doc: &ConfigDocument) {
        let Some(kind) = doc.kind.as_deref() else {
            return;
        };
        match kind {
            "RoleBinding" | "ClusterRoleBinding" => {
                self.collect_binding_subjects(doc);
                self.collect_role_ref(doc);
            }
            "PersistentVolumeClaim" => {
                self.push_leaf_edge(doc, "spec.storageClassName", TrackedKind::StorageClass, None);
                self.push_leaf_edge(doc, "spec.volumeName", TrackedKind::PersistentVolume, None);
            }
            "PersistentVolume" => {
                self.push_leaf_edge(doc, "spec.storageClassName", TrackedKind::StorageClass, None);
            }
            _ => {}
        }
        self.collect_pod_spec_references(doc);
    }

    /// `subjects[*].name` with a sibling `kind: ServiceAccount`.
    fn collect_binding_subjects(&mut self, doc: &ConfigDocument) {
        let subjects = KeyPath::from_keys(["subjects"]);
        let mut idx = 0usize;
        loop {
            let base = subjects.child_index(idx);
            if doc.leaves_under(&base).next().is_none() {
                break;
            }
            let subject_kind = doc.leaf(&base.child_key("kind"));
            if subject_kind.map(|l| l.value.raw_text.as_str()) == Some("ServiceAccount") {
                if let Some(name_leaf) = doc.leaf(&base.child_key("name")) {
                    let ns_leaf = doc.leaf(&base.child_key("namespace"));
                    let ns = match ns_leaf {
                        Some(l) if l.value.has_directives() => {
                            idx += 1;
                            continue;
                        }
                        Some(l) => Some(l.value.raw_text.as_str()),
                        None => doc_namespace(doc),
                    };
                    self.push_edge(doc, name_leaf, TrackedKind::ServiceAccount, ns);
                }
            }
            idx += 1;
        }
    }

    /// `roleRef.name` targets a Role or ClusterRole per `roleRef.kind`.
    fn collect_role_ref(&mut self, doc: &ConfigDocument) {
        let Some(kind_leaf) = doc.leaf_at("roleRef.kind") else {
            return;
        };
        let Some(name_leaf) = doc.leaf_at("roleRef.name") else {
            return;
        };
        match kind_leaf.value.raw_text.as_str() {
            "Role" => self.push_edge(doc, name_leaf, TrackedKind::Role, doc_namespace(doc)),
            "ClusterRole" => self.push_edge(doc, name_leaf, TrackedKind::ClusterRole, None),
            _ => {}
        }
    }

    /// Service account usage and PVC claims inside pod specs.
    fn collect_pod_spec_references(&mut self, doc: &ConfigDocument) {
        for pod_spec in present_pod_specs(doc) {
            for field in ["serviceAccountName", "serviceAccount"] {
                if let Some(leaf) = doc.leaf(&pod_spec.child_key(field)) {
                    self.push_edge(doc, leaf, TrackedKind::ServiceAccount, doc_namespace(doc));
                }
            }
            let volumes = pod_spec.child_key("volumes");
            let mut idx = 0usize;
            loop {
                let base = volumes.child_index(idx);
                if doc.leaves_under(&base).next().is_none() {
                    break;
                }
                let claim = base.child_key("persistentVolumeClaim").child_key("claimName");
                if let Some(leaf) = doc.leaf(&claim) {
                    self.push_edge(
                        doc,
                        leaf,
                        TrackedKind::PersistentVolumeClaim,
                        doc_namespace(doc),
                    );
                }
                idx += 1;
            }
        }
    }

    fn push_leaf_edge(
        &mut self,
        doc: &ConfigDocument,
        path: &str,
        kind: TrackedKind,
        namespace: Option<&str>,
    ) {
        let ns = if kind.is_namespaced() {
            namespace.or_else(|| doc_namespace(doc))
        } else {
            None
        };
        if let Some(leaf) = doc.leaf_at(path) {
            self.push_edge(doc, leaf, kind, ns);
        }
    }

    fn push_edge(
        &mut self,
        doc: &ConfigDocument,
        leaf: &Leaf,
        kind: TrackedKind,
        namespace: Option<&str>,
    ) {
        if leaf.value.has_directives() || leaf.value.is_null() {
            return;
        }
        if kind.is_namespaced() && namespace.is_none() && namespace_has_directives(doc) {
            return;
        }
        self.references.push(RefEdge {
            target: ResourceKey::new(kind, &leaf.value.raw_text, namespace),
            file: doc.file.clone(),
            key_path: leaf.path.clone(),
            span: leaf.span.clone(),
        });
    }
}

fn doc_namespace(doc: &ConfigDocument) -> Option<&str> {
    doc.namespace.as_deref()
}

/// True when the document's namespace value embeds directives, making the
/// resource identity unresolvable statically.
fn namespace_has_directives(doc: &ConfigDocument) -> bool {
    doc.leaf_at("metadata.namespace")
        .is_some_and(|l| l.value.has_directives())
}

/// Convenience wrapper matching the operation name used elsewhere.
pub fn build_reference_graph<'a>(
    documents: impl Iterator<Item = &'a ConfigDocument>,
) -> ReferenceGraph {
    ReferenceGraph::build(documents)
}
