//! Binary-level tests: exit codes, output formats, flat export, rule
//! config, and the eval subcommand.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

fn klint(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klint"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn scan_with_seeded_defects_exits_1_with_exactly_three_diagnostics() {
    let root = fixture("mini");
    let out = klint(&["scan", root.to_str().unwrap()], &root);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("3 defects found"), "output:\n{text}");
    assert!(text.contains("[INCORRECT_HELMING/IncorrectHelming]"));
    assert!(text.contains("[ORPHANISM/Orphanism]"));
    assert!(text.contains("[VERSION_INCOMPAT/VersionIncompatibility]"));
    assert!(text.contains("apps/v1"));
    assert!(text.contains("argocd-server"));
}

#[test]
fn scan_clean_tree_exits_0() {
    let root = fixture("detect/dangling-serviceaccount/after");
    let out = klint(&["scan", root.to_str().unwrap()], &root);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 defects found"));
}

#[test]
fn scan_missing_root_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = klint(&["scan", "definitely/not/here"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn fail_on_threshold_controls_the_exit_code() {
    // The RBAC wildcard is warning severity: error threshold passes,
    // warning threshold fails.
    let root = fixture("detect/wildcard-rbac/before");
    let as_error = klint(&["scan", root.to_str().unwrap()], &root);
    assert_eq!(as_error.status.code(), Some(0));
    let as_warning = klint(
        &["scan", root.to_str().unwrap(), "--fail-on", "warning"],
        &root,
    );
    assert_eq!(as_warning.status.code(), Some(1));
}

#[test]
fn rule_config_file_disables_rules() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("rules.yaml");
    std::fs::write(&config, "rules:\n  VERSION_INCOMPAT:\n    enabled: false\n").unwrap();
    let root = fixture("detect/deprecated-apiversion/before");
    let out = klint(
        &["scan", root.to_str().unwrap(), "--rules", config.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 defects found"));
}

#[test]
fn ignore_globs_prune_the_tree() {
    let root = fixture("mini");
    let out = klint(
        &[
            "scan",
            root.to_str().unwrap(),
            "--ignore",
            "deployment.yaml",
            "--ignore",
            "trivy-operator/**",
        ],
        &root,
    );
    let text = stdout(&out);
    assert!(text.contains("1 defect found"), "output:\n{text}");
    assert!(text.contains("ORPHANISM"));
}

#[test]
fn flat_export_writes_one_record_per_document() {
    let tmp = tempfile::tempdir().unwrap();
    let export = tmp.path().join("flat.ndjson");
    let root = fixture("mini");
    let out = klint(
        &[
            "scan",
            root.to_str().unwrap(),
            "--export-flat",
            export.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let ndjson = std::fs::read_to_string(&export).unwrap();
    let lines: Vec<&str> = ndjson.lines().collect();
    assert_eq!(lines.len(), 5, "mini corpus has 5 documents");
    let parsed: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert!(parsed.get("leaves").is_some());
    assert!(ndjson.contains("spec.template.spec.containers[0].image"));
}

#[test]
fn json_report_parses_and_carries_counts() {
    let root = fixture("mini");
    let out = klint(&["scan", root.to_str().unwrap(), "--format", "json"], &root);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["tool_name"], "klint");
    assert_eq!(report["counts"]["IncorrectHelming"], 1);
    assert_eq!(report["counts"]["Orphanism"], 1);
    assert_eq!(report["counts"]["VersionIncompatibility"], 1);
    assert_eq!(report["diagnostics"].as_array().unwrap().len(), 3);
}

#[test]
fn eval_scores_identically_from_json_and_sarif_alerts() {
    let tmp = tempfile::tempdir().unwrap();
    let root = fixture("mini");

    let json_path = tmp.path().join("alerts.json");
    let sarif_path = tmp.path().join("alerts.sarif");
    for (fmt, path) in [("json", &json_path), ("sarif", &sarif_path)] {
        let out = klint(
            &[
                "scan",
                root.to_str().unwrap(),
                "--format",
                fmt,
                "--output",
                path.to_str().unwrap(),
            ],
            tmp.path(),
        );
        assert_eq!(out.status.code(), Some(1));
    }

    let dataset = tmp.path().join("dataset.csv");
    std::fs::write(
        &dataset,
        "id,file,key_path,line,category,sub_category,pattern_note\n\
         d1,trivy-operator/templates/deployment.yaml,spec.template.spec.containers[0].image,,IncorrectHelming,,\n\
         d2,clusterrolebinding.yaml,subjects[0].name,,Orphanism,,\n\
         d3,deployment.yaml,apiVersion,,VersionIncompatibility,,\n\
         d4,deployment.yaml,spec.replicas,,EntityReferencing,,\n",
    )
    .unwrap();

    let run_eval = |alerts: &Path| {
        let out = klint(
            &[
                "eval",
                "--alerts",
                alerts.to_str().unwrap(),
                "--dataset",
                dataset.to_str().unwrap(),
            ],
            tmp.path(),
        );
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        stdout(&out)
    };

    let from_json = run_eval(&json_path);
    let from_sarif = run_eval(&sarif_path);
    assert_eq!(from_json, from_sarif, "JSON and SARIF alert paths disagree");

    // 3 alerts all match; the 4th labeled defect is missed.
    assert!(from_json.contains("IncorrectHelming"));
    assert!(from_json.lines().any(|l| l.starts_with("Overall") && l.contains("1.0000")));
    assert!(from_json.lines().any(|l| l.starts_with("Overall") && l.contains("0.7500")));
}

#[test]
fn eval_rejects_malformed_dataset_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let alerts = tmp.path().join("alerts.json");
    let root = fixture("detect/dangling-serviceaccount/after");
    klint(
        &[
            "scan",
            root.to_str().unwrap(),
            "--format",
            "json",
            "--output",
            alerts.to_str().unwrap(),
        ],
        tmp.path(),
    );
    let dataset = tmp.path().join("dataset.csv");
    std::fs::write(
        &dataset,
        "id,file,key_path,line,category,sub_category,pattern_note\nd1,a.yaml,spec.x,,Foo,,\n",
    )
    .unwrap();
    let out = klint(
        &[
            "eval",
            "--alerts",
            alerts.to_str().unwrap(),
            "--dataset",
            dataset.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 2"), "stderr: {err}");
}

#[test]
fn eval_with_empty_inputs_prints_a_zero_table_and_exits_0() {
    let tmp = tempfile::tempdir().unwrap();
    let alerts = tmp.path().join("alerts.json");
    let root = fixture("detect/dangling-serviceaccount/after");
    klint(
        &[
            "scan",
            root.to_str().unwrap(),
            "--format",
            "json",
            "--output",
            alerts.to_str().unwrap(),
        ],
        tmp.path(),
    );
    let dataset = tmp.path().join("dataset.csv");
    std::fs::write(
        &dataset,
        "id,file,key_path,line,category,sub_category,pattern_note\n",
    )
    .unwrap();
    let out = klint(
        &[
            "eval",
            "--alerts",
            alerts.to_str().unwrap(),
            "--dataset",
            dataset.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("Overall") && l.contains('0')));
}

#[test]
fn timestamp_flag_injects_a_timestamp() {
    let root = fixture("detect/dangling-serviceaccount/after");
    let with = klint(
        &["scan", root.to_str().unwrap(), "--format", "json", "--timestamp"],
        &root,
    );
    let report: serde_json::Value = serde_json::from_str(&stdout(&with)).unwrap();
    let ts = report["timestamp"].as_str().expect("timestamp present");
    assert!(ts.ends_with('Z') && ts.contains('T'), "timestamp: {ts}");

    let without = klint(&["scan", root.to_str().unwrap(), "--format", "json"], &root);
    let report: serde_json::Value = serde_json::from_str(&stdout(&without)).unwrap();
    assert!(report.get("timestamp").is_none());
}
