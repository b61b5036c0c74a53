use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use decat_core::construct::coproduct;
use decat_core::format::{parse_document, print_instance};
use decat_core::{canonical_form, presets, Instance, Schema};
use decat_harness::VerificationReport;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn decat(args: &[&str]) -> Run {
    decat_with(args, None)
}

fn decat_with(args: &[&str], threads: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_decat"));
    cmd.args(args).current_dir(corpus());
    match threads {
        Some(n) => cmd.env("DECAT_THREADS", n),
        None => cmd.env_remove("DECAT_THREADS"),
    };
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn digraph() -> Arc<Schema> {
    Arc::new(presets::digraph())
}

fn resolve(name: &str) -> Option<Arc<Schema>> {
    presets::by_name(name).map(Arc::new)
}

#[test]
fn decompose_lists_components() {
    let r = decat(&["decompose", "c3_plus_k1.inst"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "C3 ×1\nK1 ×1\n");
}

#[test]
fn hom_counts_vertices_of_a_triangle() {
    let r = decat(&["hom", "k1.inst", "c3.inst", "--count"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "3\n"));
    let listed = decat(&["hom", "k1.inst", "c3.inst", "--list"]);
    assert_eq!(listed.code, 0);
    assert_eq!(listed.stdout.matches("morphism ").count(), 3);
}

#[test]
fn decomposition_suite_passes_on_digraphs() {
    let r = decat(&[
        "verify",
        "--suite",
        "decomposition",
        "--schema",
        "digraph",
        "--upto",
        "V=3,E=3",
        "--seed",
        "7",
        "--trials",
        "100",
    ]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.ends_with("PASS\n"), "{}", r.stdout);
}

#[test]
fn canon_output_reparses_to_the_same_class() {
    for file in ["c3_plus_k1.inst", "fork.inst", "s3_line.inst", "f_tail.inst"] {
        let original = parse_document(&fs::read_to_string(corpus().join(file)).unwrap(), &resolve).unwrap();
        let r = decat(&["canon", file]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let doc = parse_document(&r.stdout, &|_| None).expect("canon output is a complete document");
        let form = canonical_form(&original.instances[0].1);
        assert!(r.stdout.starts_with(&format!("# digest {}", form.digest())), "{}", r.stdout);
        assert_eq!(doc.instances.len(), 2);
        for (_, inst) in &doc.instances {
            assert_eq!(canonical_form(inst), form);
        }
        assert_eq!(doc.instances[1].1.carriers(), form.to_instance().carriers());
        let (_, iso) = &doc.morphisms[0];
        assert!(iso.is_iso());
    }
}

#[test]
fn canon_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let first = decat(&["canon", "join.inst"]).stdout;
    let doc = parse_document(&first, &|_| None).unwrap();
    let (name, canon) = &doc.instances[1];
    let path = dir.path().join("again.inst");
    fs::write(&path, print_instance(name, canon)).unwrap();
    let second = decat(&["canon", path.to_str().unwrap()]).stdout;
    assert_eq!(first.lines().next(), second.lines().next());
}

#[test]
fn sum_expression_matches_the_coproduct_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = digraph();
    let x = Arc::new(
        Instance::from_names(
            g.clone(),
            &[("V", &["a", "b"]), ("E", &["e"])],
            &[("s", &[("e", "a")]), ("t", &[("e", "b")])],
        )
        .unwrap(),
    );
    let y = Arc::new(
        Instance::from_names(g.clone(), &[("V", &["p"]), ("E", &["l"])], &[("s", &[("l", "p")]), ("t", &[("l", "p")])])
            .unwrap(),
    );
    let xy = coproduct(&x, &y).unwrap().object;
    fs::write(dir.path().join("x.inst"), print_instance("X", &x)).unwrap();
    fs::write(dir.path().join("y.inst"), print_instance("Y", &y)).unwrap();
    fs::write(dir.path().join("xy.inst"), print_instance("XY", &xy)).unwrap();
    let d = dir.path().to_str().unwrap();
    let sum = decat(&["eval", "X + Y", "--defs", d]);
    let file = decat(&["eval", "XY", "--defs", d]);
    assert_eq!(sum.code, 0, "{}", sum.stderr);
    assert_eq!(sum.stdout, file.stdout);
    assert_eq!(sum.stdout, "{X: 1, Y: 1}\n");
    assert_eq!(decat(&["eval", "XY - X - Y", "--defs", d]).stdout, "0\n");
}

#[test]
fn grothendieck_identity_evaluates_to_zero() {
    let r = decat(&["eval", "A2*A2 - A2 - K1 - K1"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "0\n"));
    assert_eq!(decat(&["eval", "A2*A2 - A2 - 2*K1"]).stdout, "0\n");
}

#[test]
fn c2_marks_table() {
    let r = decat(&["marks", "--schema", "c2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows: Vec<&str> = r.stdout.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["2 0", "1 1"]);
}

#[test]
fn syntax_errors_carry_positions() {
    let r = decat(&["eval", "A2 + * K1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("syntax error at 1:6"), "{}", r.stderr);
    let r = decat(&["eval", "(A2 + K1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("syntax error"), "{}", r.stderr);
}

#[test]
fn unknown_identifiers_are_errors() {
    let r = decat(&["eval", "A2 + NOPE"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("NOPE"), "{}", r.stderr);
}

#[test]
fn missing_and_malformed_files_fail() {
    let r = decat(&["validate", "does_not_exist.inst"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error: "));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.inst");
    fs::write(&bad, "instance B : digraph { V = {a}; E = {e}; s = {e->a}; }").unwrap();
    let r = decat(&["validate", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1, "{}", r.stdout);
    fs::write(&bad, "instance B : digraph { V = {a} E = {}; }").unwrap();
    assert_eq!(decat(&["validate", bad.to_str().unwrap()]).code, 1);
    fs::write(&bad, "instance B : nowhere { X = {a}; }").unwrap();
    assert_eq!(decat(&["validate", bad.to_str().unwrap()]).code, 1);
}

#[test]
fn relation_violations_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.inst");
    fs::write(&bad, "instance T : c2 { X = {a, b, c}; g = {a->b, b->c, c->a}; }").unwrap();
    let r = decat(&["validate", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1, "{}", r.stdout);
}

#[test]
fn schemas_next_to_the_file_are_found() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("loops.schema"), "schema loops { node X; arrow f: X -> X; relation f.f = f; }").unwrap();
    let inst = dir.path().join("p.inst");
    fs::write(&inst, "instance P : loops { X = {a, b}; f = {a->b, b->b}; }").unwrap();
    let r = decat(&["validate", inst.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = decat(&["enumerate", "--schema", dir.path().join("loops.schema").to_str().unwrap(), "--upto", "X=2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.matches("instance ").count(), 4);
}

#[test]
fn guard_refuses_large_universes() {
    let r = decat(&["enumerate", "--schema", "s3", "--upto", "X=8"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("--force"), "{}", r.stderr);
    let r = decat(&["verify", "--schema", "digraph", "--upto", "V=4,E=6"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.stdout, "");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(decat(&["frobnicate"]).code, 1);
    assert_eq!(decat(&["hom", "k1.inst"]).code, 1);
    assert_eq!(decat(&["verify", "--suite", "nope", "--schema", "c2"]).code, 1);
    assert_eq!(decat(&["--help"]).code, 0);
}

#[test]
fn fault_injected_engine_fails_with_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let r = decat(&[
        "verify",
        "--suite",
        "extensive",
        "--schema",
        "digraph",
        "--upto",
        "V=2,E=1",
        "--trials",
        "20",
        "--engine",
        "shared-tag",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 1, "{}", r.stdout);
    assert!(r.stdout.ends_with("FAIL\n"));
    let parsed = VerificationReport::from_json(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(!parsed.failures.is_empty());
    assert_eq!(parsed.engine, "shared-tag");
}

#[test]
fn reports_for_all_suites_form_an_array() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("all.json");
    let r = decat(&["verify", "--schema", "c2", "--trials", "10", "--report", report.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let reports = value.as_array().expect("an array");
    assert_eq!(reports.len(), decat_harness::SUITES.len());
    for item in reports {
        let parsed = VerificationReport::from_json(&item.to_string()).unwrap();
        assert_eq!(parsed.schema, "c2");
    }
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["verify", "--schema", "digraph", "--upto", "V=2,E=2", "--trials", "20", "--seed", "3"],
        vec!["enumerate", "--schema", "endo", "--upto", "X=3"],
        vec!["profile", "fork.inst", "--upto", "V=2,E=2"],
        vec!["marks", "--schema", "s3"],
    ];
    for args in cases {
        let one = decat_with(&args, Some("1"));
        assert_eq!(one.code, 0, "{args:?}: {}", one.stderr);
        for threads in [None, Some("3")] {
            let again = decat_with(&args, threads);
            assert_eq!(again.code, one.code);
            assert_eq!(again.stdout, one.stdout, "{args:?}");
        }
    }
}

#[test]
fn bad_thread_counts_are_rejected() {
    let r = decat_with(&["eval", "K1"], Some("lots"));
    assert_eq!(r.code, 1);
}
