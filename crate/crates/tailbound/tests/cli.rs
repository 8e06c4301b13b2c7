use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use tailbound::lengths::{lengths_to_json, lengths_to_text};

fn tailbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailbound"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn single_unit_length_bound() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "one.txt", "1");
    let out = tailbound(&["bound", "--b-file", &f, "--mu", "0.5", "--s", "0.75"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(
        (v["bound"].as_f64().unwrap() - 0.877383).abs() < 1e-6,
        "{v}"
    );
    assert_eq!(v["edge_case"], Value::Null);
    assert_eq!(v["solver"]["status"], "converged");
}

#[test]
fn threshold_at_mean_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "one.txt", "1\n");
    for method in ["joint", "nested"] {
        let out = tailbound(&[
            "bound", "--b-file", &f, "--mu", "0.5", "--s", "0.5", "--method", method,
        ]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["bound"], 1.0);
        assert_eq!(v["edge_case"], "TrivialOne");
        assert_eq!(v["method"], method);
    }
}

#[test]
fn threshold_above_total_has_neg_inf_log_bound() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "b.json", "[0.5, 0.5]");
    let out = tailbound(&["bound", "--b-file", &f, "--mu", "0.5", "--s", "2"]);
    let v = json(&out);
    assert_eq!(v["log_bound"], "-inf");
    assert_eq!(v["bound"], 0.0);
    assert_eq!(v["edge_case"], "TrivialZero");
}

#[test]
fn compare_adds_hoeffding() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "one.txt", "1\n");
    let out = tailbound(&["compare", "--b-file", &f, "--mu", "0.5", "--s", "0.75"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let h = (-2.0f64 * 0.25 * 0.25).exp();
    assert!((v["bound_hoeffding"].as_f64().unwrap() - h).abs() < 1e-15);
    assert!(v["log10_ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn pvalue_two_unit_variables() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "b.txt", "# two coins\n1\n1\n");
    let out = tailbound(&["pvalue", "--b-file", &f, "--mu0", "1", "--s-obs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["p_value"].as_f64().unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn malformed_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.txt", "1\n-2\n");
    let out = tailbound(&["bound", "--b-file", &f, "--mu", "0.5", "--s", "0.7"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    let f = write(dir.path(), "empty.txt", "\n# nothing\n");
    let out = tailbound(&["bound", "--b-file", &f, "--mu", "0.5", "--s", "0.7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mean_outside_range_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "one.txt", "1");
    let out = tailbound(&["bound", "--b-file", &f, "--mu", "1.5", "--s", "1.7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_is_io_error() {
    let out = tailbound(&[
        "sweep",
        "--seed",
        "1",
        "--n",
        "5",
        "--s-count",
        "3",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_twice_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = tailbound(&[
            "sweep",
            "--seed",
            "7",
            "--n",
            "30",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("mu,s,bound_new,bound_hoeffding,log10_ratio")
    );
    assert_eq!(lines.next(), Some("0.8,0.8,1,1,0"));
    assert_eq!(text.lines().count(), 1 + 3 * 60);
}

#[test]
fn sweep_json_to_stdout() {
    let out = tailbound(&[
        "sweep",
        "--seed",
        "3",
        "--n",
        "10",
        "--mus",
        "0.5",
        "--s-count",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["s"], 0.5);
    assert_eq!(rows[3]["s"], 0.995);
    for r in rows {
        assert!(r["bound_new"].as_f64().unwrap() <= r["bound_hoeffding"].as_f64().unwrap() + 1e-12);
    }
}

#[test]
fn selfcheck_passes() {
    let out = tailbound(&["selfcheck", "--seed", "11"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.ends_with("5 of 5 checks passed\n"), "{text}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn lengths_files_round_trip_through_cli(lengths in proptest::collection::vec(0.01f64..10.0, 1..8)) {
        let dir = tempfile::tempdir().unwrap();
        let total: f64 = lengths.iter().sum();
        let (mu, s) = (format!("{}", 0.4 * total), format!("{}", 0.7 * total));
        let text = write(dir.path(), "b.txt", &lengths_to_text(&lengths));
        let js = write(dir.path(), "b.json", &lengths_to_json(&lengths));
        let a = tailbound(&["bound", "--b-file", &text, "--mu", &mu, "--s", &s]);
        let b = tailbound(&["bound", "--b-file", &js, "--mu", &mu, "--s", &s]);
        prop_assert_eq!(a.status.code(), Some(0));
        prop_assert_eq!(a.stdout, b.stdout);
    }
}
