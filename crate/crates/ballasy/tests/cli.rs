use std::process::{Command, Output};

use serde_json::Value;

fn ballasy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ballasy"))
        .args(args)
        .env("BALL_ASY_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_examples() {
    let o = ballasy(&["classify", "--family", "propB", "--n", "1", "--delta", "0", "--t", "1.5", "--r", "1", "--k", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("B(4): t+r−δ>n+1>max{r−δ,t−δ}"));

    let o = ballasy(&["classify", "--family", "propA-I", "--n", "2", "--c", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "A(1): bounded"));

    let o = ballasy(&["classify", "--family", "p32", "--n", "1", "--delta", "0", "--t", "1", "--r", "3", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no case"));
}

#[test]
fn malformed_flags_exit_one() {
    assert_eq!(ballasy(&["classify", "--family", "propB", "--n", "one"]).status.code(), Some(1));
    assert_eq!(ballasy(&["verify", "--family", "propA-I", "--c", "1", "--coupling", "diagonal"]).status.code(), Some(1));
}

#[test]
fn verify_closed_form_case_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let o = ballasy(&["verify", "--family", "propA-I", "--n", "1", "--c", "1", "--output", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("A(3) pass"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(lines.next(), Some("m,radius,dir_index,coupling,lhs,lhs_err,rhs,ratio,case_id"));
    assert_eq!(lines.count(), 12);

    let json = dir.path().join("summary.json");
    let o = ballasy(&[
        "verify", "--family", "propA-I", "--n", "1", "--c", "1", "--format", "json", "--output", json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["case", "excluded_rows", "predicted", "slope", "verdict", "window"]);
    assert_eq!(v["verdict"], "pass");
    assert!(v["window"].as_f64().unwrap() <= 1.01);
}

#[test]
fn verify_one_sided_lower_bound() {
    let o = ballasy(&["verify", "--family", "l22", "--n", "1", "--t", "1.6", "--r", "0.4", "--k", "-1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("lower bound only"));
}

#[test]
fn shifted_estimate_fails() {
    let o = ballasy(&["verify", "--family", "propA-I", "--n", "1", "--c", "1", "--rhs-shift", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("fail"));
}

#[test]
fn unwritable_output_exits_four() {
    let o = ballasy(&["verify", "--family", "propA-I", "--c", "1", "--output", "/nonexistent-dir/rows.csv"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "family = \"propB\"\nn = 1\ndelta = 0.0\nt = 1.5\nr = 1.0\nk = 0.0\n").unwrap();
    let o = ballasy(&["classify", "--config", conf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("B(4)"));
    let o = ballasy(&["classify", "--config", conf.to_str().unwrap(), "--t", "0.5", "--r", "0.5"]);
    assert!(stdout(&o).starts_with("B(1)"));
    std::fs::write(&conf, "family = \"propB\"\nshoe_size = 9\n").unwrap();
    assert_eq!(ballasy(&["classify", "--config", conf.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn reports_are_byte_stable() {
    let args = ["verify", "--family", "propC", "--n", "1", "--t", "0.5", "--r", "-0.5", "--coupling", "fixed", "--fixed-point", "-0.3,0.4", "--format", "json"];
    let a = ballasy(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_ballasy")).args(args).env("BALL_ASY_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

fn multiplier(psi: &str, extra: &[&str]) -> Value {
    let mut args = vec!["multiplier", "--psi", psi, "--n", "1", "--p", "2", "--s", "0", "--mu-alpha", "0.5"];
    args.extend_from_slice(extra);
    let o = ballasy(&args);
    assert_eq!(o.status.code(), Some(0));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn multiplier_reports() {
    let one = multiplier("one", &[]);
    for (id, c) in one["criteria"].as_object().unwrap() {
        assert!(c["value"].as_f64().unwrap().is_finite(), "{id}");
        assert_eq!(c["diverges"], false, "{id}");
    }
    assert_eq!(one["criteria"]["weighted_modulus"]["value"].as_f64(), Some(1.0));

    let psi1 = multiplier("psi1", &[]);
    assert_eq!(psi1["criteria"]["bloch_log"]["diverges"], true);

    let psi2 = multiplier("psi2", &[]);
    assert_eq!(psi2["criteria"]["bloch_log"]["diverges"], false);
    assert_eq!(psi2["criteria"]["modulus"]["diverges"], true);
}
