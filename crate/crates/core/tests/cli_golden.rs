use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dea_bench::cli::{parse_csv, parse_csv_str, write_dataset_csv};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn dea_bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dea-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn check_golden(args: &[&str], expected: &str) {
    let first = dea_bench(args);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let second = dea_bench(args);
    assert_eq!(first.stdout, second.stdout, "output differs between runs");
    let want = std::fs::read_to_string(golden(expected)).unwrap();
    assert_eq!(String::from_utf8(first.stdout).unwrap(), want);
}

#[test]
fn classify_worked_example() {
    check_golden(
        &["classify", golden("worked_example.csv").to_str().unwrap()],
        "classify.csv",
    );
}

#[test]
fn targets_worked_example() {
    check_golden(
        &["targets", golden("worked_example.csv").to_str().unwrap()],
        "targets.csv",
    );
}

#[test]
fn two_step_worked_example_certified() {
    check_golden(
        &[
            "two-step",
            golden("worked_example.csv").to_str().unwrap(),
            "--certify",
        ],
        "two_step_certify.csv",
    );
}

#[test]
fn two_step_worked_example_markdown() {
    check_golden(
        &[
            "two-step",
            golden("worked_example.csv").to_str().unwrap(),
            "--format",
            "markdown",
        ],
        "two_step.md",
    );
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("levels.csv");
    let run = dea_bench(&[
        "classify",
        golden("worked_example.csv").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    assert!(run.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(out).unwrap(),
        std::fs::read_to_string(golden("classify.csv")).unwrap()
    );
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("header.csv", "id,in:x,y\na,1,2\nb,2,1\n", "classify"),
        ("value.csv", "id,in:x,out:y\na,1,2\nb,x,1\n", "classify"),
        ("negative.csv", "id,in:x,out:y\na,1,2\nb,-1,1\n", "targets"),
        ("dry.csv", "id,in:x,out:y\na,1,1\nb,2,2\n", "two-step"),
    ];
    for (name, text, command) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let run = dea_bench(&[command, path.to_str().unwrap()]);
        assert_eq!(run.status.code(), Some(2), "{name}");
        assert!(run.stdout.is_empty(), "{name}");
        assert!(!run.stderr.is_empty(), "{name}");
    }
    let dry = dea_bench(&["two-step", dir.path().join("dry.csv").to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&dry.stderr).contains("before level 2"));

    let worked_example = golden("worked_example.csv");
    for args in [
        vec![
            "two-step",
            worked_example.to_str().unwrap(),
            "--alphas",
            "0.5,2",
        ],
        vec!["classify", worked_example.to_str().unwrap(), "--depth", "0"],
        vec!["targets", worked_example.to_str().unwrap(), "--dmu", "Z"],
        vec!["classify", "/definitely/not/here.csv"],
        vec!["frobnicate", worked_example.to_str().unwrap()],
    ] {
        assert_eq!(dea_bench(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn universities_fixture_parses() {
    let ds = parse_csv(&golden("universities.csv")).unwrap();
    assert_eq!((ds.m(), ds.s(), ds.len()), (2, 4, 4));
    assert_eq!(parse_csv_str(&write_dataset_csv(&ds)).unwrap(), ds);
    let run = dea_bench(&[
        "classify",
        golden("universities.csv").to_str().unwrap(),
        "--depth",
        "1",
    ]);
    assert_eq!(run.status.code(), Some(0));
}
