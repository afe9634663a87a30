//! Static analysis for Kubernetes configuration scripts.
//!
//! The pipeline has three stages: parsing Kind scripts and Helm charts into
//! flattened key/value documents ([`parser`]), matching rules over a corpus
//! of documents and a cross-document reference graph ([`rules`]), and
//! emitting diagnostics in text, JSON, or SARIF form ([`report`]).
//!
//! [`eval`] is a companion harness that scores any alert stream against a
//! labeled defect dataset and computes per-category precision and recall.

pub mod discover;
pub mod eval;
pub mod model;
pub mod parser;
pub mod report;
pub mod rules;
pub mod scan;
pub mod taxonomy;
