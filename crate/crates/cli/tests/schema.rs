//! Golden checks on the output schema: column names and JSON keys are part
//! of the CLI contract and must not drift.

use std::process::Command;

fn hypgreen() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypgreen"))
}

fn run_ok(args: &[&str]) -> String {
    let out = hypgreen().args(args).output().expect("spawn");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn eval_csv_header_is_stable() {
    let text = run_ok(&[
        "eval",
        "comparator",
        "--n",
        "3",
        "--lambda",
        "0",
        "--a",
        "1",
        "--x",
        "0,0,2",
        "--y",
        "0,0,3",
    ]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "target,n,lambda,a,x,y,value,abs_err,method,wall_time_s"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 10);
    // comparator value at the reference pair is sqrt(12)
    let value: f64 = row[6].parse().unwrap();
    assert!((value - 12.0f64.sqrt()).abs() < 1e-12);
    // floats carry 17 significant digits (1 + 16 after the point)
    assert!(row[2].contains('.') && row[2].split('.').nth(1).unwrap().len() >= 17);
}

#[test]
fn eval_json_keys_are_stable() {
    let text = run_ok(&[
        "eval",
        "comparator",
        "--n",
        "3",
        "--x",
        "0,0,2",
        "--y",
        "0,0,3",
        "--format",
        "json",
    ]);
    let line = text.lines().next().unwrap();
    for key in [
        "\"target\":",
        "\"n\":",
        "\"lambda\":",
        "\"a\":",
        "\"x\":",
        "\"y\":",
        "\"value\":",
        "\"abs_err\":",
        "\"method\":",
        "\"wall_time_s\":",
    ] {
        assert!(line.contains(key), "missing {key} in {line}");
    }
    assert!(line.starts_with('{') && line.ends_with('}'));
}

#[test]
fn bounds_csv_schema_and_summary() {
    let text = run_ok(&[
        "bounds",
        "kernel",
        "--nu",
        "1",
        "--grid",
        "t:0.2:2:2:log,offset:0.1:2:2:log",
        "--refine",
        "false",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,x,y,ratio");
    let body: Vec<&str> = lines.collect();
    let n_rows = body.iter().filter(|l| !l.starts_with('#')).count();
    assert_eq!(n_rows, 2 * 2 * 2);
    assert!(body.iter().any(|l| l.starts_with("# summary:")));
}

#[test]
fn simulate_csv_schema() {
    let text = run_ok(&[
        "simulate",
        "bessel",
        "--nu",
        "1",
        "--x",
        "2",
        "--a",
        "1",
        "--paths",
        "3",
        "--dt",
        "0.01",
        "--horizon",
        "0.5",
        "--seed",
        "9",
    ]);
    assert_eq!(
        text.lines().next().unwrap(),
        "path_id,t,a_value,position,aux_clock,hit_time,a_at_hit,survived"
    );
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn verify_reports_and_exit_codes() {
    let out = hypgreen()
        .args(["verify", "reflection"])
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().next().unwrap().starts_with("suite,check,measured,tolerance,status"));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("PASS"));

    // unknown suite: non-zero exit
    let bad = hypgreen().args(["verify", "nonsense"]).output().unwrap();
    assert!(!bad.status.success());
}

#[test]
fn domain_error_gives_nonzero_exit() {
    let out = hypgreen()
        .args(["eval", "potential", "--n", "3", "--x", "0,0,2", "--y", "0,0,2"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular"));
}

#[test]
fn comparator_accepts_zero_barrier() {
    let text = run_ok(&[
        "eval",
        "comparator",
        "--n",
        "3",
        "--a",
        "0",
        "--x",
        "0,0,2",
        "--y",
        "0,0,3",
    ]);
    assert!(text.lines().count() == 2);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, "n = 3\nlambda = 0\na = 1\nx = 0,0,2\ny = 0,0,3\n").unwrap();
    let from_cfg = run_ok(&["eval", "comparator", "--config", cfg_path.to_str().unwrap()]);
    let row = from_cfg.lines().nth(1).unwrap();
    let value: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    assert!((value - 12.0f64.sqrt()).abs() < 1e-12);

    // explicit flag wins over the config value
    let overridden = run_ok(&[
        "eval",
        "comparator",
        "--config",
        cfg_path.to_str().unwrap(),
        "--y",
        "0,0,4",
    ]);
    let row = overridden.lines().nth(1).unwrap();
    let value2: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    assert!((value2 - value).abs() > 1e-6);
}
