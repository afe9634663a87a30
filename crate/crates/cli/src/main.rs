//! Command-line front end: `klint scan` runs the pipeline over a directory
//! tree; `klint eval` scores an alert stream against a labeled dataset.
//!
//! Exit codes: 0 when no diagnostic reaches the failure threshold, 1 when
//! at least one does, 2 on tool errors (I/O, malformed inputs).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use klint_core::eval::{load_alerts, load_dataset, score};
use klint_core::model::Severity;
use klint_core::report::{emit, Format};
use klint_core::rules::RuleConfig;
use klint_core::scan::{flat_export, scan, ScanOptions};

#[derive(Parser)]
#[command(name = "klint", version, about = "Static analysis for Kubernetes configuration scripts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Sarif,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Sarif => Format::Sarif,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeverityArg {
    Info,
    Warning,
    Error,
}

impl From<SeverityArg> for Severity {
    fn from(s: SeverityArg) -> Self {
        match s {
            SeverityArg::Info => Severity::Info,
            SeverityArg::Warning => Severity::Warning,
            SeverityArg::Error => Severity::Error,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Scan a directory tree of Kubernetes configuration scripts.
    Scan {
        /// Directory to scan.
        root: PathBuf,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Rule configuration file (YAML).
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Glob of root-relative paths to skip; repeatable.
        #[arg(long = "ignore")]
        ignore: Vec<String>,
        /// Write the flattened key-value export (newline-delimited JSON) here.
        #[arg(long)]
        export_flat: Option<PathBuf>,
        /// Lowest severity that makes the exit code 1.
        #[arg(long, value_enum, default_value_t = SeverityArg::Error)]
        fail_on: SeverityArg,
        /// Worker pool size for parsing (default: one per CPU).
        #[arg(long)]
        workers: Option<usize>,
        /// Write the report to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Record the current time in the report (breaks byte determinism).
        #[arg(long)]
        timestamp: bool,
    },
    /// Score an alert stream against a labeled defect dataset.
    Eval {
        /// Alerts: a JSON report produced by `scan --format json`, or any
        /// SARIF 2.1.0 log with category properties.
        #[arg(long)]
        alerts: PathBuf,
        /// Dataset: CSV (id, file, key_path, line, category, sub_category,
        /// pattern_note) or a JSON array of the same fields.
        #[arg(long)]
        dataset: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Scan {
            root,
            format,
            rules,
            ignore,
            export_flat: export_path,
            fail_on,
            workers,
            output,
            timestamp,
        } => {
            let rule_config = match rules {
                Some(path) => Some(RuleConfig::from_file(&path)?),
                None => None,
            };
            let options = ScanOptions {
                rule_config,
                ignore_globs: ignore,
                workers,
                timestamp: timestamp.then(now_rfc3339),
            };
            let outcome = scan(&root, &options)?;

            if let Some(path) = export_path {
                std::fs::write(&path, flat_export(&outcome.corpus))
                    .with_context(|| format!("failed to write flat export to {}", path.display()))?;
            }

            let bytes = emit(&outcome.report, format.into());
            match output {
                Some(path) => std::fs::write(&path, &bytes)
                    .with_context(|| format!("failed to write report to {}", path.display()))?,
                None => std::io::stdout().write_all(&bytes)?,
            }

            for failure in &outcome.rule_failures {
                eprintln!("rule {} failed: {}", failure.rule_id, failure.message);
            }
            if !outcome.rule_failures.is_empty() {
                return Ok(ExitCode::from(2));
            }

            let threshold: Severity = fail_on.into();
            let failing = outcome
                .report
                .diagnostics
                .iter()
                .any(|d| d.severity >= threshold);
            Ok(ExitCode::from(u8::from(failing)))
        }
        Command::Eval { alerts, dataset } => {
            let alerts = load_alerts(&alerts)?;
            let defects = load_dataset(&dataset)?;
            let report = score(&alerts, &defects);

            let mut dataset_counts = std::collections::BTreeMap::<String, usize>::new();
            for d in &defects {
                *dataset_counts.entry(d.category.to_string()).or_default() += 1;
            }

            let fmt_ratio = |r: Option<f64>| match r {
                Some(v) => format!("{v:.4}"),
                None => "-".to_string(),
            };
            println!("{:<28} {:>5} {:>8} {:>8}", "Category", "#", "P", "R");
            for (category, s) in &report.per_category {
                let count = dataset_counts.get(category).copied().unwrap_or(0);
                println!(
                    "{:<28} {:>5} {:>8} {:>8}",
                    category,
                    count,
                    fmt_ratio(s.precision),
                    fmt_ratio(s.recall)
                );
            }
            println!(
                "{:<28} {:>5} {:>8} {:>8}",
                "Overall",
                defects.len(),
                fmt_ratio(report.overall.precision),
                fmt_ratio(report.overall.recall)
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Current UTC time as RFC 3339 without sub-second precision.
fn now_rfc3339() -> String {
    chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string()
}
