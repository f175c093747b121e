use std::path::Path;
use std::process::{Command, Output};

fn triadic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triadic"))
        .args(args)
        .env_remove("TRIADIC_JOBS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON record")
}

fn without_wall_time(mut v: serde_json::Value) -> String {
    v.as_object_mut().unwrap().remove("wall_time_secs");
    v.to_string()
}

#[test]
fn run_trivial_cases() {
    let out = triadic(&["run", "--n", "100", "--r", "3", "--p", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["final_edges_nonhub"], 0);

    let out = triadic(&["run", "--n", "6", "--r", "3", "--p", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["final_edges_nonhub"], 10);
}

#[test]
fn run_is_deterministic() {
    let args = ["run", "--n", "300", "--p", "n^-0.7", "--seed", "42", "--per-round", "--stats", "full"];
    let a = triadic(&args);
    let b = triadic(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_wall_time(json(&a)), without_wall_time(json(&b)));
    let rounds = json(&a)["result"]["per_round"].as_array().unwrap().len();
    assert!(rounds >= 1);
}

#[test]
fn exit_codes_and_streams() {
    let cap = triadic(&["run", "--n", "200", "--p", "0.05", "--seed", "1", "--max-rounds", "1"]);
    assert_eq!(cap.status.code(), Some(2));
    assert_eq!(json(&cap)["result"]["terminated"], false);

    let bad = triadic(&["run", "--n", "2", "--r", "3", "--p", "0.5", "--seed", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(bad.stdout.is_empty());
    assert!(!bad.stderr.is_empty());

    let usage = triadic(&["run", "--n", "ten", "--p", "0.5", "--seed", "1"]);
    assert_eq!(usage.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));

    let full_too_big = triadic(&["run", "--n", "600", "--p", "0.01", "--seed", "1", "--stats", "full"]);
    assert_eq!(full_too_big.status.code(), Some(1));
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn sweep_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.toml",
        "seed = 3\ntrials = 4\nkind = \"final-size\"\n[[grid]]\nn = [60, 80]\np = \"n^-0.75\"\n[output]\ncsv = \"out.csv\"\njson = \"out.json\"\n",
    );
    let out = triadic(&["sweep", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let stdout = json(&out);
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(without_wall_time(stdout.clone()), without_wall_time(file));
    assert_eq!(stdout["kind"], "final-size");
    assert_eq!(stdout["result"]["points"][0]["trials"].as_array().unwrap().len(), 4);
}

#[test]
fn sweep_kind_flag_and_concentration() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "c.toml", "seed = 1\ntrials = 3\nstats = \"full\"\n[[grid]]\nn = 150\np = \"n^-0.6\"\n");
    let csv = dir.path().join("m.csv");
    let out = triadic(&["sweep", spec.to_str().unwrap(), "--kind", "concentration", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["result"][0]["regime"], "case1");
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("n,r,p,regime,round,quantity,claim,relation,bound,empirical_max,margin,fraction_within,trials"));

    let missing_kind = triadic(&["sweep", spec.to_str().unwrap()]);
    assert_eq!(missing_kind.status.code(), Some(1));
}

#[test]
fn sweep_errors() {
    let dir = tempfile::tempdir().unwrap();
    let r4 = write(dir.path(), "t.toml", "seed = 1\ntrials = 2\nkind = \"threshold\"\n[[grid]]\nn = 50\nc = 0.5\nr = 4\n");
    let out = triadic(&["sweep", r4.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r = 3"));

    let empty = write(dir.path(), "e.toml", "seed = 1\ntrials = 2\nkind = \"connectivity\"\n");
    assert_eq!(triadic(&["sweep", empty.to_str().unwrap()]).status.code(), Some(1));

    let malformed = write(dir.path(), "m.toml", "seed = 1\ntrials = 2\n[[grid]]\nn = 50\np = \"0.1*\"\n");
    let out = triadic(&["sweep", malformed.to_str().unwrap(), "--kind", "final-size"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let missing = triadic(&["sweep", "/nonexistent/spec.toml", "--kind", "final-size"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn sweep_jobs_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.toml", "seed = 8\ntrials = 6\n[[grid]]\nn = 120\nc = [0.3, 0.8]\n");
    let a = triadic(&["sweep", spec.to_str().unwrap(), "--kind", "threshold", "--jobs", "1"]);
    let b = Command::new(env!("CARGO_BIN_EXE_triadic"))
        .args(["sweep", spec.to_str().unwrap(), "--kind", "threshold"])
        .env("TRIADIC_JOBS", "3")
        .output()
        .unwrap();
    let strip = |o: &Output| {
        let mut v = json(o);
        v.as_object_mut().unwrap().remove("wall_time_secs");
        v["config"].as_object_mut().unwrap().remove("parallelism");
        v.to_string()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(json(&b)["config"]["parallelism"], 3);
}

#[test]
fn compare_cases() {
    let out = triadic(&["compare", "--n", "4", "--r", "3", "--p", "0.5", "--seed", "2", "--trials", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["exact"]["expectation"], 1.6875);
    assert!(v["result"]["z"].as_f64().unwrap().abs() <= 3.0);

    let v = json(&triadic(&["compare", "--n", "6", "--p", "1", "--seed", "2", "--trials", "10"]));
    assert_eq!(v["result"]["exact"]["expectation"], 10.0);
    assert_eq!(v["result"]["empirical_mean"], 10.0);
    assert_eq!(v["result"]["z"], 0.0);

    let over = triadic(&["compare", "--n", "12", "--p", "0.5", "--seed", "2"]);
    assert_eq!(over.status.code(), Some(1));
}
