//! End-to-end tests of the command-line tool: exit codes, output shapes
//! and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sspectral"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const DIAG12: &str = r#"{"n":2,"entries":[[[1,0,0,0],[0,0,0,0]],[[0,0,0,0],[2,0,0,0]]]}"#;
const E2: &str = r#"{"n":1,"entries":[[[0,0,1,0]]]}"#;
const NON_NORMAL: &str = r#"{"n":2,"entries":[[[1,0,0,0],[5,0,0,0]],[[0,0,0,0],[2,0,0,0]]]}"#;

#[test]
fn spectrum_lists_two_atoms_of_a_diagonal_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "diag12.json", DIAG12);
    let out = run(&["spectrum", "--input", input.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "re,im,multiplicity\n1,0,1\n2,0,1\n");

    let json = run(&["spectrum", "--input", input.to_str().unwrap()]);
    assert_eq!(json.status.code(), Some(0));
    let text = stdout(&json);
    assert!(text.contains("\"normal\": true"), "{text}");
    assert!(text.contains("\"dim\": 2"), "{text}");
}

#[test]
fn spectrum_of_e2_reports_the_unit_sphere_atom() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "e2.json", E2);
    let out = run(&["spectrum", "--input", input.to_str().unwrap(), "--j", "e1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"re\": 0"), "{text}");
    // The sphere sits at height 1 up to eigensolver rounding.
    assert!(text.contains("\"im\": 0.99999") || text.contains("\"im\": 1,"), "{text}");
}

#[test]
fn spectrum_with_output_writes_json_and_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "diag12.json", DIAG12);
    let report = dir.path().join("spec.json");
    let out = run(&[
        "spectrum",
        "--input",
        input.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = std::fs::read_to_string(&report).unwrap();
    assert!(json.contains("\"spheres\""));
    let csv = std::fs::read_to_string(dir.path().join("spec.csv")).unwrap();
    assert_eq!(csv, "re,im,multiplicity\n1,0,1\n2,0,1\n");
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.json", "not json at all");
    let out = run(&["spectrum", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let ragged = write(
        dir.path(),
        "ragged.json",
        r#"{"n":2,"entries":[[[0,0,0,0],[0,0,0,0]],[[0,0,0,0]]]}"#,
    );
    let out = run(&["spectrum", "--input", ragged.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_and_bad_flags_exit_2() {
    assert_eq!(run(&["spectrum"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "diag12.json", DIAG12);
    let path = input.to_str().unwrap();
    assert_eq!(run(&["apply", "--input", path]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--input", path, "--j", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--input", path, "--j", "0.5,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--atol", "-1"]).status.code(), Some(2));
    assert_eq!(
        run(&["apply", "--input", path, "--fn", "nonsense"]).status.code(),
        Some(2)
    );
}

#[test]
fn non_normal_input_exits_4_where_normality_is_required() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "nn.json", NON_NORMAL);
    let path = input.to_str().unwrap();
    for cmd in ["decompose", "measure", "verify", "transform"] {
        let out = run(&[cmd, "--input", path]);
        assert_eq!(out.status.code(), Some(4), "{cmd}");
        let err = String::from_utf8(out.stderr.clone()).unwrap();
        assert!(err.contains("not normal"), "{cmd}: {err}");
    }
    assert_eq!(run(&["apply", "--input", path, "--fn", "id"]).status.code(), Some(4));
}

#[test]
fn verify_passes_on_the_synthetic_matrix_and_is_deterministic() {
    let a = run(&["verify", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["verify", "--seed", "42"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("\"passed\": true"));
    assert!(stdout(&a).contains("negative_control/corruption_detected"));

    let c = run(&["verify", "--seed", "43"]);
    assert_eq!(c.status.code(), Some(0));
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn verify_exits_1_when_tolerances_cannot_be_met() {
    let out = run(&["verify", "--atol", "1e-22", "--rtol", "1e-22"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"passed\": false"));
}

#[test]
fn apply_id_round_trips_the_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "diag12.json", DIAG12);
    let out = run(&["apply", "--input", input.to_str().unwrap(), "--fn", "id"]);
    assert_eq!(out.status.code(), Some(0));
    let original = sspectral::report::parse_matrix(DIAG12).unwrap();
    let returned = sspectral::report::parse_matrix(&stdout(&out)).unwrap();
    assert!(returned.sub(&original).frob_norm() <= 1e-12);

    // The emitted matrix is itself valid command input.
    let again = write(dir.path(), "again.json", &stdout(&out));
    let out2 = run(&["spectrum", "--input", again.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out2.status.code(), Some(0));
    assert_eq!(stdout(&out2), "re,im,multiplicity\n1,0,1\n2,0,1\n");
}

#[test]
fn apply_sq_matches_the_matrix_square() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "diag12.json", DIAG12);
    let out = run(&["apply", "--input", input.to_str().unwrap(), "--fn", "sq"]);
    assert_eq!(out.status.code(), Some(0));
    let m = sspectral::report::parse_matrix(&stdout(&out)).unwrap();
    let t = sspectral::report::parse_matrix(DIAG12).unwrap();
    assert!(m.sub(&t.matmul(&t)).frob_norm() <= 1e-12);
}

#[test]
fn transform_report_has_the_expected_values_for_diag12() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "diag12.json", DIAG12);
    let out = run(&["transform", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"norm_T\": 2"), "{text}");
    // |Z| = 2 / sqrt(5), the compressed top eigenvalue.
    assert!(text.contains("\"norm_Z\": 0.894427190999915"), "{text}");
    assert!(text.contains("\"min_gap_1_minus_p2\": 0.2"), "{text}");
}
