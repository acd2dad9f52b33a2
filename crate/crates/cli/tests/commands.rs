use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use metasheet_core::fixtures;
use metasheet_core::{
    parse_workbook, resolve_template, serialize_delimited, validate_table, write_workbook, ResolvedTemplate,
    Separator, Table, TermClient,
};

fn metasheet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metasheet"))
        .args(args)
        .env_remove("METASHEET_REGISTRY")
        .env_remove("METASHEET_TERMS")
        .output()
        .expect("binary runs")
}

fn with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_metasheet"))
        .args(args)
        .env_remove("METASHEET_REGISTRY")
        .env_remove("METASHEET_TERMS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn rnaseq() -> ResolvedTemplate {
    resolve_template(&fixtures::template("rnaseq").unwrap(), &TermClient::builtin()).unwrap()
}

fn faulty_table() -> Table {
    let mut table = fixtures::rnaseq_table();
    table.cell_mut(3, "dataset_type").unwrap().raw = "rnaseq".into();
    table.cell_mut(5, "is_target").unwrap().raw = "maybe".into();
    *table.cell_mut(9, "parent_sample_id").unwrap() = metasheet_core::Cell::blank("parent_sample_id");
    table
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn clean_workbook_validates_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clean.xlsx");
    fs::write(&path, write_workbook(&rnaseq(), &fixtures::rnaseq_table()).unwrap()).unwrap();

    let out = metasheet(&["sheet", "validate", path_str(&path)]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("0 issues in 16 records"), "{}", text(&out.stdout));
}

#[test]
fn faulty_workbook_json_matches_in_process_report() {
    let rt = rnaseq();
    let table = faulty_table();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("faulty.xlsx");
    let bytes = write_workbook(&rt, &table).unwrap();
    fs::write(&path, &bytes).unwrap();

    let out = metasheet(&["sheet", "validate", path_str(&path), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let parsed = parse_workbook(&bytes).unwrap();
    let expected = serde_json::to_vec(&validate_table(&rt, &parsed)).unwrap();
    assert_eq!(out.stdout, expected);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["issues"].as_array().unwrap().len(), 3);
}

#[test]
fn human_report_lists_clusters_and_suggestions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("faulty.xlsx");
    fs::write(&path, write_workbook(&rnaseq(), &faulty_table()).unwrap()).unwrap();

    let out = metasheet(&["sheet", "validate", path_str(&path), "--suggest"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = text(&out.stdout);
    assert!(stdout.contains("3 issues in 16 records (3 erroneous; 1 completeness, 2 adherence)"), "{stdout}");
    assert!(stdout.contains("not_in_value_set in dataset_type (1)"), "{stdout}");
    assert!(stdout.contains("suggest: RNAseq (1.00, synonym)"), "{stdout}");
    assert!(stdout.contains("missing_required in parent_sample_id (1)"), "{stdout}");
}

#[test]
fn stdin_accepts_delimited_input() {
    let tsv = serialize_delimited(&fixtures::rnaseq_table(), Separator::Tab);
    let out = with_stdin(&["sheet", "validate", "-"], tsv.as_bytes());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).starts_with("rnaseq@5.0.0: 0 issues in 16 records"));

    let csv = serialize_delimited(&faulty_table(), Separator::Comma);
    let out = with_stdin(&["sheet", "validate", "-", "--separator", "comma", "--json"], csv.as_bytes());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generate_unknown_template_exits_three_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.xlsx");
    let out = metasheet(&["sheet", "generate", "--template", "nosuch@1.0.0", "-o", path_str(&out_path)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("nosuch@1.0.0"), "{}", text(&out.stderr));
    assert!(!out_path.exists());
}

#[test]
fn generate_writes_workbook_skeleton_and_field_reference() {
    let dir = tempfile::tempdir().unwrap();
    let xlsx = dir.path().join("rnaseq.xlsx");
    let doc = dir.path().join("rnaseq.md");
    let out = metasheet(&[
        "sheet", "generate", "--template", "rnaseq@5.0.0", "-o", path_str(&xlsx), "--spec-doc", path_str(&doc),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let table = parse_workbook(&fs::read(&xlsx).unwrap()).unwrap();
    assert!(table.is_empty());
    assert_eq!(table.headers(), fixtures::RNASEQ_HEADERS);
    assert_eq!(table.provenance().unwrap().template_id, "rnaseq");
    assert!(fs::read_to_string(&doc).unwrap().starts_with("# RNAseq (no probes) (rnaseq@5.0.0)"));

    let tsv = dir.path().join("rnaseq.tsv");
    let out = metasheet(&["sheet", "generate", "--template", "rnaseq@5.0.0", "-o", path_str(&tsv), "--tsv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&tsv).unwrap(), format!("{}\n", fixtures::RNASEQ_HEADERS.join("\t")));
}

#[test]
fn template_lint_and_register() {
    let dir = tempfile::tempdir().unwrap();
    let doc = fixtures::template_dir().join("histology.json");

    let out = metasheet(&["template", "lint", path_str(&doc), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap().is_array());

    let registry = dir.path().join("registry");
    let out = metasheet(&["template", "register", path_str(&doc), "--registry", path_str(&registry)]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("registered histology@2.2.0"));
    assert!(registry.join("histology/2.2.0.json").exists());

    let again = metasheet(&["template", "register", path_str(&doc), "--registry", path_str(&registry)]);
    assert!(text(&again.stdout).contains("unchanged"));

    let changed = fs::read_to_string(&doc).unwrap().replacen("\"Histology\"", "\"Histology, renamed\"", 1);
    let changed_path = dir.path().join("changed.json");
    fs::write(&changed_path, changed).unwrap();
    let conflict = metasheet(&["template", "register", path_str(&changed_path), "--registry", path_str(&registry)]);
    assert_eq!(conflict.status.code(), Some(2));

    let out_path = dir.path().join("h.xlsx");
    let from_dir = metasheet(&[
        "sheet", "generate", "--template", "histology@2.2.0", "--registry", path_str(&registry), "-o", path_str(&out_path),
    ]);
    assert_eq!(from_dir.status.code(), Some(0), "{}", text(&from_dir.stderr));
    let missing = metasheet(&[
        "sheet", "generate", "--template", "rnaseq@5.0.0", "--registry", path_str(&registry), "-o", path_str(&out_path),
    ]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn malformed_template_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"id\": \"x\",").unwrap();
    let out = metasheet(&["template", "lint", path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(text(&out.stderr).starts_with("error:"));
}

#[test]
fn repair_applies_patches_and_revalidates() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("faulty.tsv");
    fs::write(&input, serialize_delimited(&faulty_table(), Separator::Tab)).unwrap();
    let patches = dir.path().join("patches.json");
    fs::write(
        &patches,
        r#"[{"row": 3, "column": "dataset_type", "value": "RNAseq"},
            {"row": 5, "column": "is_target", "value": "No"},
            {"row": 9, "column": "parent_sample_id", "value": "HBM347.LXXJ.548"}]"#,
    )
    .unwrap();
    let output = dir.path().join("fixed.tsv");
    let out = metasheet(&[
        "sheet", "repair", path_str(&input), "--patches", path_str(&patches), "-o", path_str(&output),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("0 issues in 16 records"));
    assert_eq!(
        fs::read_to_string(&output).unwrap(),
        serialize_delimited(&fixtures::rnaseq_table(), Separator::Tab)
    );

    let validate = metasheet(&["sheet", "validate", path_str(&output)]);
    assert_eq!(validate.status.code(), Some(0));

    fs::write(&patches, r#"[{"row": 99, "column": "lab_id", "value": "x"}]"#).unwrap();
    let out = metasheet(&[
        "sheet", "repair", path_str(&input), "--patches", path_str(&patches), "-o", path_str(&output),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(metasheet(&["sheet", "validate"]).status.code(), Some(2));
    assert_eq!(metasheet(&["sheet", "frobnicate"]).status.code(), Some(2));
    assert_eq!(
        metasheet(&["sheet", "generate", "--template", "no-version", "-o", "x.xlsx"]).status.code(),
        Some(2)
    );
    assert_eq!(metasheet(&["sheet", "validate", "/nonexistent/file.xlsx"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unknown.tsv");
    fs::write(&path, "a\tb\n1\t2\n").unwrap();
    let out = metasheet(&["sheet", "validate", path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("error:"));
}
