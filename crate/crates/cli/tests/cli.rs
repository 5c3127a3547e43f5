//! End-to-end runs of the binary: exit codes, help text, determinism and
//! golden outputs. Set `BWSHIFT_BLESS=1` to rewrite the golden files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bwshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bwshift"))
        .args(args)
        .output()
        .expect("spawn bwshift")
}

fn stdout(args: &[&str]) -> String {
    let out = bwshift(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bwshift-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn constant_config(a: &str, b: &str, variant: &str) -> String {
    format!(
        r#"{{
  "p": 2,
  "basis_variant": "{variant}",
  "a": [{{"where": "otherwise", "expr": "{a}"}}],
  "b": [{{"where": "otherwise", "expr": "{b}"}}],
  "w": [{{"where": "otherwise", "expr": "1"}}]
}}"#
    )
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("BWSHIFT_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; rerun with BWSHIFT_BLESS=1", path.display()));
    assert_eq!(actual, expected, "{name} differs from its golden file");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bwshift(&["analyze", "--preset", "bergman", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--no-such-flag"));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let out = bwshift(&["validate", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn unknown_preset_lists_the_available_ones() {
    let out = bwshift(&["analyze", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bergman"));
}

#[test]
fn vanishing_a_is_a_config_error() {
    let cfg = r#"{
  "p": 2,
  "a": [{"where": "n==7", "expr": "0"}, {"where": "otherwise", "expr": "1"}],
  "w": [{"where": "otherwise", "expr": "1"}]
}"#;
    let path = temp_file("zero_a.json", cfg);
    let out = bwshift(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("a_7 = 0"), "{}", stderr(&out));
}

#[test]
fn divergent_norm_series_is_a_numeric_error() {
    // b/a = 3/2 makes the expansion of every z^nu with nu < 0 blow up
    let path = temp_file("divergent.json", &constant_config("2", "3", "full_affine"));
    let out = bwshift(&["norms", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("diverges"));
}

#[test]
fn csv_is_rejected_for_json_only_commands() {
    let out = bwshift(&["analyze", "--preset", "bergman", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_lists_each_subcommand_flag() {
    let cases: [(&str, &[&str]); 5] = [
        ("analyze", &["--preset", "--horizon", "--nmax"]),
        (
            "orbit",
            &[
                "--vector",
                "--steps",
                "--schedule",
                "--candidates",
                "--tolerance",
            ],
        ),
        ("matrix", &["--power", "--i-max", "--window"]),
        ("norms", &["--range", "--format"]),
        ("validate", &["--preset", "--out"]),
    ];
    for (cmd, flags) in cases {
        let text = stdout(&[cmd, "--help"]);
        for flag in flags {
            assert!(text.contains(flag), "`{cmd} --help` lacks {flag}");
        }
    }
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let args = ["analyze", "--preset", "example_chaotic"];
    let first = stdout(&args);
    assert_eq!(first, stdout(&args));
    let mut serial = args.to_vec();
    serial.extend(["--threads", "1"]);
    assert_eq!(first, stdout(&serial));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let path = temp_file("norms_out.json", "");
    let printed = stdout(&["norms", "--preset", "bergman"]);
    stdout(&[
        "norms",
        "--preset",
        "bergman",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(fs::read_to_string(path).unwrap(), printed);
}

#[test]
fn matrix_csv_golden() {
    golden(
        "matrix_zero_one.csv",
        &stdout(&[
            "matrix",
            "--preset",
            "zero_one_failure",
            "--window",
            "-4:4",
            "--format",
            "csv",
        ]),
    );
}

#[test]
fn norms_csv_golden() {
    golden(
        "norms_bergman.csv",
        &stdout(&[
            "norms", "--preset", "bergman", "--range", "-2:2", "--format", "csv",
        ]),
    );
}

#[test]
fn orbit_csv_golden() {
    golden(
        "orbit_example_chaotic.csv",
        &stdout(&[
            "orbit",
            "--preset",
            "example_chaotic",
            "--vector",
            r#"{"basis": "schauder", "entries": [[0, 1.0]]}"#,
            "--steps",
            "6",
            "--format",
            "csv",
        ]),
    );
}

#[test]
fn validate_golden() {
    golden(
        "validate_example_chaotic.json",
        &stdout(&["validate", "--preset", "example_chaotic"]),
    );
}

#[test]
fn analyze_golden() {
    golden(
        "analyze_classical_rolewicz.json",
        &stdout(&["analyze", "--preset", "classical_rolewicz"]),
    );
}
