mod common;

use std::path::Path;

use common::*;
use hilbert_diag::cli::{run, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use hilbert_diag::io::{parse_problem, parse_solution, to_canonical_json, ProblemFile, ReportFile, SolutionFile};
use hilbert_diag::{construct_example8, diagonalize_selfadjoint};
use proptest::prelude::*;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["hilbert-diag"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_files_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let module = random_module(&mut r);
        let k = random_self_adjoint(&mut r, &module);
        let text = to_canonical_json(&ProblemFile::from_operator(&k)).unwrap();
        let parsed = parse_problem(&text).unwrap();
        prop_assert!(parsed == k);
        prop_assert_eq!(&to_canonical_json(&ProblemFile::from_operator(&parsed)).unwrap(), &text);

        let res = diagonalize_selfadjoint(&k, 1e-9).unwrap();
        let sol = to_canonical_json(&SolutionFile::from_result(&res)).unwrap();
        let back = parse_solution(&sol).unwrap();
        prop_assert!(back == res);
        prop_assert_eq!(&to_canonical_json(&SolutionFile::from_result(&back)).unwrap(), &sol);
    }
}

#[test]
fn example8_command_passes() {
    let (code, out, _) = cli(&["example8"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    assert!(out.contains("{1.000000, 4.000000, 4.000000, 9.000000} = {1, 4, 4, 9}"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn prop4_command_lists_signed_eigenvalues() {
    let (code, out, _) = cli(&["prop4", "--n", "3", "--alphas", "1,0.5,0.25"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    assert!(out.contains("↦ (0) ⊕ (0.5) ⊕ (0)"), "{out}");
    assert!(out.contains("↦ (0) ⊕ (-0.5) ⊕ (0)"), "{out}");
}

#[test]
fn prop4_rejects_bad_alphas() {
    let (code, _, err) = cli(&["prop4", "--n", "3", "--alphas", "1,2,0.25"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.starts_with("error:"));
    assert_eq!(cli(&["prop4", "--n", "3", "--alphas", "1,0.5"]).0, EXIT_INPUT);
}

#[test]
fn empty_and_malformed_files_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.json", "");
    let (code, _, err) = cli(&["diagonalize", "--input", &empty]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("empty input"), "{err}");

    let broken = write(dir.path(), "broken.json", "{\"schema\": 1,\n \"algebra\": ");
    let (code, _, err) = cli(&["spectrum", "--input", &broken]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 2"), "{err}");

    let wrong = write(
        dir.path(),
        "wrong.json",
        r#"{"schema":1,"algebra":{"blocks":[2]},"module_rank":1,"operator":[[[[[1,0],[0,0],[0,0]]]]]}"#,
    );
    let (code, _, err) = cli(&["diagonalize", "--input", &wrong]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("operator[0][0][0]"), "{err}");

    let missing = dir.path().join("missing.json");
    assert_eq!(cli(&["spectrum", "--input", missing.to_str().unwrap()]).0, EXIT_INPUT);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(cli(&["--help"]).0, EXIT_PASS);
}

#[test]
fn diagonalize_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ex = construct_example8();
    let problem = write(
        dir.path(),
        "k.json",
        &to_canonical_json(&ProblemFile::from_operator(&ex.operator)).unwrap(),
    );
    let report = dir.path().join("report.json");
    let report_path = report.to_str().unwrap();
    let (code, out, _) = cli(&["diagonalize", "--input", &problem, "--out", report_path]);
    assert_eq!(code, EXIT_PASS, "{out}");
    let text = std::fs::read_to_string(&report).unwrap();
    let parsed: ReportFile = serde_json::from_str(&text).unwrap();
    assert!(parsed.report.passed);
    assert_eq!(parsed.solution.ordering_certificate, vec!["0 ≤ Λ_3", "Λ_3 ≤ Λ_1"]);
    // bit-identical re-serialization
    assert_eq!(to_canonical_json(&parsed).unwrap(), text);

    let (code, out, _) = cli(&["verify", "--input", &problem, "--solution", report_path]);
    assert_eq!(code, EXIT_PASS, "{out}");

    // the (x, y) family is a valid eigen-relation but not a diagonalization
    let bad = write(
        dir.path(),
        "xy.json",
        &to_canonical_json(&SolutionFile::from_result(&ex.generator_solution().unwrap())).unwrap(),
    );
    let (code, out, _) = cli(&["verify", "--input", &problem, "--solution", &bad]);
    assert_eq!(code, EXIT_FAIL, "{out}");
    assert!(out.contains("FAIL (iii)"));

    // stdout output when --out is absent
    let (code, out, _) = cli(&["diagonalize", "--input", &problem]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out, text);
}

#[test]
fn spectrum_command_prints_each_block() {
    let dir = tempfile::tempdir().unwrap();
    let ex = construct_example8();
    let problem = write(
        dir.path(),
        "k.json",
        &to_canonical_json(&ProblemFile::from_operator(&ex.operator)).unwrap(),
    );
    let (code, out, _) = cli(&["spectrum", "--input", &problem]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out.lines().count(), 1);
    assert!(
        out.starts_with("block 0 (M2): 9.000000000000 4.000000000000 4.000000000000 1.000000000000"),
        "{out}"
    );
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hilbert-diag");
    let status = std::process::Command::new(bin).arg("example8").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_PASS));
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.json", "");
    let status = std::process::Command::new(bin)
        .args(["verify", "--input", &empty, "--solution", &empty])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_INPUT));
}

#[test]
fn emitted_fixtures_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let ex_path = dir.path().join("ex8.json");
    let (code, out, _) = cli(&["example8", "--emit", ex_path.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS, "{out}");
    let k = parse_problem(&std::fs::read_to_string(&ex_path).unwrap()).unwrap();
    assert!(k == construct_example8().operator);

    let p4_path = dir.path().join("p4.json");
    let (code, out, _) = cli(&[
        "prop4",
        "--n",
        "3",
        "--alphas",
        "1,0.5,0.25",
        "--emit",
        p4_path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_PASS, "{out}");
    let (code, out, _) = cli(&[
        "diagonalize",
        "--input",
        p4_path.to_str().unwrap(),
        "--out",
        dir.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_PASS, "{out}");
}
