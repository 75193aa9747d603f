use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nu-chord"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nu-chord-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn f(v: &Value, key: &str) -> f64 {
    v["result"][key]
        .as_f64()
        .unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn metric_of_a_plant_with_itself_is_zero() {
    let v = run_json(&["metric", "@p1", "@p1"]);
    assert_eq!(f(&v, "d_cr"), 0.0);
    assert_eq!(v["command"], "metric");
}

#[test]
fn metric_matches_the_closed_form() {
    let v = run_json(&["metric", "@p1", "@p_a1.2"]);
    let expect = 0.2 / (2.0f64 * (1.0 + 1.44)).sqrt();
    assert!((f(&v, "d_cr") - expect).abs() <= 1e-6);
    assert!((f(&v, "d_cr") - 0.0905357).abs() <= 1e-6);
    assert_eq!(v["result"]["branch"], "kappa_sup");
}

#[test]
fn mismatched_instances_exit_2() {
    let c = scratch(
        "circle.json",
        r#"{"instance":"circle","plant":{"kind":"rational","num":[1],"den":[3,1]}}"#,
    );
    let out = run(&["metric", "@p1", c.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_2() {
    let bad = scratch(
        "bad.json",
        r#"{"instance":"circle","plant":{"kind":"rational","num":[1]}}"#,
    );
    assert_eq!(run(&["margin", bad.to_str().unwrap(), "@zero"]).status.code(), Some(2));
    assert_eq!(
        run(&["margin", "/nonexistent/spec.json", "@zero"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["margin", "@nope", "@zero"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn non_coprime_factors_exit_3() {
    let nc = scratch(
        "nc.json",
        r#"{"instance":"halfplane_c0ap","plant":{"kind":"cf","n":[{"num":[1],"den":[1,1]}],"d":[{"num":[1],"den":[1,1]}]}}"#,
    );
    assert_eq!(run(&["metric", nc.to_str().unwrap(), "@p1"]).status.code(), Some(3));
}

#[test]
fn exhausted_grid_exits_4() {
    let out = run(&["--max-grid", "16", "--tol", "1e-15", "margin", "@p1", "@controller"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn zero_loop_has_unit_margin() {
    let v = run_json(&["margin", "@zero", "@zero"]);
    assert_eq!(f(&v, "mu"), 1.0);
    assert_eq!(v["result"]["stabilizes"], true);
}

#[test]
fn delay_loop_margin() {
    let v = run_json(&["margin", "@p1", "@controller"]);
    let inv = f(&v, "mu_inverse");
    assert!((3.20..=3.25).contains(&inv), "{inv}");
    assert!(f(&v, "formula_delta") <= 1e-7);
}

#[test]
fn non_stabilizing_pair_is_a_valid_answer() {
    let out = run(&["--json", "margin", "@unstable_first_order", "@zero"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(f(&v, "mu"), 0.0);
    assert_eq!(v["result"]["stabilizes"], false);
}

#[test]
fn certify_identity_and_example_triples() {
    let same = run_json(&["certify", "@p1", "@controller", "@p1"]);
    let cert = &same["result"]["certificate"];
    assert_eq!(cert["lower_bound"], cert["mu_nominal"]);

    let near = run_json(&["certify", "--direct-mu", "@p1", "@controller", "@p_a1.2"]);
    let cert = &near["result"]["certificate"];
    assert_eq!(cert["stabilized"], true);
    assert_eq!(cert["bound_holds"], true);
    assert!(cert["lower_bound"].as_f64().unwrap() >= 0.2 - 0.0906);

    let far = run_json(&["certify", "@p1", "@controller", "@p_a0.5"]);
    let cert = &far["result"]["certificate"];
    assert!(cert["lower_bound"].as_f64().unwrap() <= 0.0);
    assert_eq!(cert["stabilized"], false);
}

fn sweep_rows(extra: &[&str]) -> Vec<csv::StringRecord> {
    let mut args = vec!["sweep", "@p1", "@controller", "--template", "@pa_template"];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap(),
        vec![
            "a",
            "d_cr",
            "closed_form",
            "mu_lower_bound",
            "certified",
            "achieved_tol"
        ]
    );
    rdr.records().map(|r| r.unwrap()).collect()
}

#[test]
fn sweep_certifies_the_open_interval() {
    let rows = sweep_rows(&["--param-range", "0.68:1.48:0.05"]);
    assert_eq!(rows.len(), 17);
    for r in &rows {
        let d: f64 = r[1].parse().unwrap();
        let closed: f64 = r[2].parse().unwrap();
        assert!((d - closed).abs() <= 1e-6, "{r:?}");
        assert_eq!(&r[4], "true", "{r:?}");
    }
}

#[test]
fn sweep_at_one_is_zero_and_certified() {
    let rows = sweep_rows(&["--param-range", "1:1:0.1"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(&rows[0][4], "true");
}

#[test]
fn crude_bound_does_not_certify_a_beyond_the_interval() {
    let rows = sweep_rows(&["--param-range", "1.6:1.6:0.1", "--mu-bound", "0.2"]);
    let d: f64 = rows[0][1].parse().unwrap();
    assert!(d > 0.2 && (d - 0.6 / (2.0f64 * 3.56).sqrt()).abs() <= 1e-6);
    assert_eq!(&rows[0][4], "false");
}

#[test]
fn kappa_csv_is_written() {
    let path = std::env::temp_dir().join(format!("nu-chord-kappa-{}.csv", std::process::id()));
    let out = run(&["metric", "@p1", "@p_a1.2", "--kappa-csv", path.to_str().unwrap()]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["theta", "omega", "kappa"]);
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1024);
    assert!(rows
        .iter()
        .all(|r| (0.0..=0.0906).contains(&r[2].parse::<f64>().unwrap())));
    std::fs::remove_file(path).ok();
}

#[test]
fn json_is_deterministic_across_thread_counts() {
    let strip = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_nu-chord"))
            .args(["--json", "metric", "@p1", "@p_a1.2"])
            .env("NU_CHORD_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_ms");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip("1"), strip("3"));
}

#[test]
fn digest_tracks_inputs_and_flags() {
    let a = run_json(&["margin", "@zero", "@zero"]);
    let b = run_json(&["--tol", "1e-8", "margin", "@zero", "@zero"]);
    assert_ne!(a["inputs_digest"], b["inputs_digest"]);
    assert_eq!(
        a["inputs_digest"],
        run_json(&["margin", "@zero", "@zero"])["inputs_digest"]
    );
}

#[test]
fn invalid_thread_count_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_nu-chord"))
        .args(["margin", "@zero", "@zero"])
        .env("NU_CHORD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(String::from_utf8_lossy(&out.stdout).matches("PASS").count(), 5);
}
