use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcommute"));
    cmd.args(args).env_remove("QCOMMUTE_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn count_k_closed_form() {
    let out = run(&["count", "--set", "k", "--n", "2", "--q", "3", "--m", "2"]);
    assert_eq!(code(&out), 0);
    let r = records(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["value"], "417");
    assert_eq!(r[0]["method"], "closed_form");
}

#[test]
fn all_methods_agree_with_verdict() {
    let out = run(&["count", "--set", "k", "--n", "2", "--q", "2", "--m", "1", "--method", "all", "--threads", "1"]);
    assert_eq!(code(&out), 0);
    let r = records(&out);
    let methods: Vec<&str> = r.iter().map(|x| x["method"].as_str().unwrap()).collect();
    assert_eq!(methods, ["closed_form", "series", "oracle", "verdict"]);
    for x in &r[..3] {
        assert_eq!(x["value"], "88");
    }
    assert_eq!(r[3]["value"], "consistent");
}

#[test]
fn similarity_classes_all_methods() {
    let out = run(&["count", "--set", "s", "--n", "2", "--q", "3", "--m", "2", "--method", "all"]);
    assert_eq!(code(&out), 0);
    let r = records(&out);
    assert!(r[..3].iter().all(|x| x["value"] == "4"));
}

#[test]
fn explicit_zeta_in_extension_field() {
    let out = run(&["count", "--set", "u", "--n", "2", "--p", "2", "--k", "2", "--zeta", "t", "--method", "all"]);
    assert_eq!(code(&out), 0);
    let r = records(&out);
    assert_eq!(r[0]["m"], 3);
    assert_eq!(r[3]["value"], "consistent");
}

#[test]
fn polynomials() {
    let out = run(&["poly", "--set", "k", "--n", "1", "--m", "2"]);
    let r = records(&out);
    assert_eq!(r[0]["poly"], "2*q - 1");
    assert_eq!(r[0]["validity"], "requires m | q-1");
    let out = run(&["poly", "--set", "n", "--n", "2"]);
    assert_eq!(records(&out)[0]["poly"], "2*q^4 - q^2");
}

#[test]
fn series_coefficients() {
    let out = run(&["series", "--set", "k", "--m", "2", "--max-n", "1"]);
    assert_eq!(records(&out)[1]["coefficient"], "(2*q - 1) / (q - 1)");
    let out = run(&["series", "--set", "n", "--max-n", "1"]);
    assert_eq!(records(&out)[1]["coefficient"], "q / (q - 1)");
    let out = run(&["series", "--set", "u", "--m", "2", "--max-n", "2", "--eval-q", "3"]);
    let r = records(&out);
    // 192 / |GL_2(F_3)|
    assert_eq!(r[2]["value"], "4");
}

#[test]
fn csv_output_has_one_header() {
    let out = run(&["--format", "csv", "count", "--set", "n", "--n", "2", "--q", "3", "--method", "all"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "set,n,q,m,zeta,method,value");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].ends_with(",closed_form,153"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["count", "--set", "k", "--n", "2", "--q", "4", "--m", "2"])), 2);
    assert_eq!(code(&run(&["count", "--set", "k", "--n", "2", "--q", "6", "--m", "1"])), 2);
    assert_eq!(code(&run(&["count", "--set", "k", "--n", "2", "--q", "3", "--zeta", "0"])), 2);
    assert_eq!(code(&run(&["count", "--set", "k", "--n", "2", "--q", "3"])), 2);
    assert_eq!(code(&run(&["count", "--set", "k", "--n", "2", "--q", "5", "--zeta", "4", "--m", "4"])), 2);
    assert_eq!(code(&run(&["series", "--set", "k", "--m", "1", "--max-n", "41"])), 2);
    assert_eq!(code(&run(&["bogus"])), 2);
}

#[test]
fn budget_refusal_exits_3_before_output() {
    let out = run_env(
        &["count", "--set", "k", "--n", "2", "--q", "3", "--m", "1", "--method", "all"],
        &[("QCOMMUTE_BUDGET", "2^5")],
    );
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
    let out = run(&["count", "--set", "k", "--n", "7", "--q", "2", "--m", "1", "--method", "oracle"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_fast_passes_and_is_deterministic() {
    let a = run(&["verify", "--level", "fast", "--threads", "1"]);
    assert_eq!(code(&a), 0);
    let r = records(&a);
    let last = r.last().unwrap();
    assert_eq!(last["check"], "summary");
    assert_eq!(last["passed"], true);
    let b = run(&["verify", "--level", "fast", "--threads", "1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn count_output_is_byte_identical_across_runs() {
    let args = ["count", "--set", "u", "--n", "2", "--q", "5", "--m", "4", "--method", "all", "--threads", "1"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
