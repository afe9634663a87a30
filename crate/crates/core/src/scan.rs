//! The scan pipeline: discover files, parse them on a worker pool, assemble
//! the corpus, run the rules, and build the report.
//!
//! Parsing is a pure function of file bytes, so the pool size never changes
//! the outcome: results merge at a single barrier and everything downstream
//! is sorted.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::discover::{discover, DiscoverError, IgnoreList};
use crate::model::{ConfigDocument, ScriptKind};
use crate::parser::chart::load_chart_from;
use crate::parser::{export_flat, parse_source, HelmChart, SyntaxIssue};
use crate::report::Report;
use crate::rules::{run_rules, Corpus, RuleConfig, RuleFailure, RuleRegistry};

#[derive(Debug, Default, Clone)]
pub struct ScanOptions {
    pub rule_config: Option<RuleConfig>,
    pub ignore_globs: Vec<String>,
    /// Worker pool size for parsing; `None` uses the rayon default.
    pub workers: Option<usize>,
    /// RFC 3339 timestamp injected into the report when requested.
    pub timestamp: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    #[error(transparent)]
    Discover(#[from] DiscoverError),
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug)]
pub struct ScanOutcome {
    pub report: Report,
    pub corpus: Corpus,
    pub rule_failures: Vec<RuleFailure>,
}

enum Parsed {
    Docs(Vec<ConfigDocument>),
    Chart(HelmChart, Vec<SyntaxIssue>),
    Failure(SyntaxIssue),
    Error(ScanError),
}

/// Scans `root` and produces the report plus the corpus it was built from.
pub fn scan(root: &Path, options: &ScanOptions) -> Result<ScanOutcome, ScanError> {
    let ignore = IgnoreList::new(&options.ignore_globs)?;
    let discovered = discover(root, &ignore)?;

    enum Task {
        File(PathBuf),
        Chart(PathBuf),
    }
    let tasks: Vec<Task> = discovered
        .standalone
        .into_iter()
        .map(Task::File)
        .chain(discovered.chart_roots.into_iter().map(Task::Chart))
        .collect();

    let parse_task = |task: &Task| -> Parsed {
        match task {
            Task::File(rel) => {
                let abs = root.join(rel);
                match std::fs::read_to_string(&abs) {
                    Ok(text) => match parse_source(&text, rel, ScriptKind::KindScript) {
                        Ok(docs) => Parsed::Docs(docs),
                        Err(issue) => Parsed::Failure(issue),
                    },
                    Err(source) => Parsed::Error(ScanError::Io { path: abs, source }),
                }
            }
            Task::Chart(rel) => match load_chart_from(rel, Some(root)) {
                Ok(load) => Parsed::Chart(load.chart, load.failures),
                Err(crate::parser::ChartError::Io { path, source }) => {
                    Parsed::Error(ScanError::Io { path, source })
                }
                Err(crate::parser::ChartError::NotADirectory(p)) => Parsed::Error(ScanError::Io {
                    path: p,
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
                }),
            },
        }
    };

    let results: Vec<Parsed> = match options.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| tasks.par_iter().map(parse_task).collect())
        }
        None => tasks.par_iter().map(parse_task).collect(),
    };

    let mut standalone = Vec::new();
    let mut charts = Vec::new();
    let mut failures = Vec::new();
    for parsed in results {
        match parsed {
            Parsed::Docs(docs) => standalone.extend(docs),
            Parsed::Chart(chart, mut chart_failures) => {
                charts.push(chart);
                failures.append(&mut chart_failures);
            }
            Parsed::Failure(issue) => failures.push(issue),
            Parsed::Error(err) => return Err(err),
        }
    }

    let corpus = Corpus::assemble(root, standalone, charts, failures);

    let config = options.rule_config.clone().unwrap_or_default();
    let registry = RuleRegistry::builtin();
    let outcome = run_rules(&corpus, &registry, &config);

    let mut report = Report::new(root.to_string_lossy().into_owned(), outcome.diagnostics);
    report.timestamp = options.timestamp.clone();

    Ok(ScanOutcome {
        report,
        corpus,
        rule_failures: outcome.failures,
    })
}

/// Newline-delimited flat export of every document in the corpus, in
/// deterministic order.
pub fn flat_export(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in corpus.documents() {
        out.push_str(&export_flat(doc).to_json());
        out.push('\n');
    }
    out
}
