use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quasicircle::cli::{execute, Document, Report, RunConfig, Status};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasicircle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn convergent_value(v: &Value) -> f64 {
    assert_eq!(v["kind"]["verdict"], "Convergent", "{v}");
    v["kind"]["value"][0].as_f64().unwrap()
}

#[test]
fn zero_field_is_admissible_with_zero_report() {
    let o = bin(&["conditions", "--field", "zero"]);
    assert_eq!(code(&o), 0);
    let v = json_stdout(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "conditions");
    assert_eq!(v["status"], "consistent");
    let r = &v["report"];
    assert_eq!(r["admissibility"]["via_condition1"], true);
    assert_eq!(r["admissibility"]["via_condition2"], true);
    assert_eq!(convergent_value(&r["condition1"]), 0.0);
    assert_eq!(convergent_value(&r["condition2"]), 0.0);
    assert_eq!(r["condition3_ratio"], 0.0);
    assert_eq!(r["twb_sup_over_t"]["sup"], 0.0);
    assert_eq!(r["prop1_sup_over_a"]["sup"], 0.0);
}

#[test]
fn power_law_is_admissible_via_condition2() {
    let o = bin(&["conditions", "--field", "power_law:0.75", "--t-sweep", "0", "--a-sweep", "0"]);
    assert_eq!(code(&o), 0);
    let r = &json_stdout(&o)["report"];
    assert_eq!(r["admissibility"]["via_condition2"], true);
    let expected = 8.0 * 2f64.sqrt();
    assert!((convergent_value(&r["condition2"]) - expected).abs() < 1e-6);
    let trace = r["condition2"]["dyadic_trace"].as_array().unwrap();
    let last = trace.last().unwrap()["partial_sum"][0].as_f64().unwrap();
    assert!((last - expected).abs() < 1e-5, "{last}");
}

#[test]
fn example5_all_writes_dossier_and_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e5");
    let o = bin(&["example5", "--all", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("example5.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["report"]["condition2"]["kind"]["verdict"], "Convergent");
    assert_eq!(v["report"]["dini"]["kind"]["verdict"], "Divergent");
    for name in ["boundary", "sigma", "omega", "tangent", "condition2_trace", "dini_trace"] {
        assert!(out.join(format!("{name}.csv")).is_file(), "{name}");
    }
    let boundary = fs::read_to_string(out.join("boundary.csv")).unwrap();
    assert!(boundary.starts_with("tau,re,im\n"));
    assert_eq!(boundary.lines().count(), 2049);
    assert!(matches!(Document::from_json(&text).unwrap().report, Report::Example5(_)));
}

#[test]
fn inconsistent_verdicts_exit_with_two() {
    let o = bin(&["conditions", "--field", "constant:0.3", "--t-sweep", "0", "--a-sweep", "0"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json_stdout(&o)["status"], "inconsistent");
    let o = bin(&["twb", "--field", "constant:0.3", "--t-sweep", "0", "--a-sweep", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn errors_exit_with_one() {
    assert_eq!(code(&bin(&["conditions", "--field", "cubic:1"])), 1);
    assert_eq!(code(&bin(&["conditions"])), 1);
    assert_eq!(code(&bin(&["whitney", "--max-generation", "41"])), 1);
    assert_eq!(code(&bin(&["conditions", "--field", "csv_grid:/definitely/missing.csv"])), 1);
    assert_eq!(code(&bin(&[])), 1);
    assert_eq!(code(&bin(&["--help"])), 0);
}

#[test]
fn config_files_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let out = dir.path().join("out");
    fs::write(
        &good,
        format!(r#"{{"command":"whitney","max_generation":3,"output":{{"out":{:?}}}}}"#, out.to_str().unwrap()),
    )
    .unwrap();
    assert_eq!(code(&bin(&["--config", good.to_str().unwrap()])), 0);
    assert!(out.join("whitney.json").is_file());
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"command":"whitney","max_generation":3,"colour":"red"}"#).unwrap();
    assert_eq!(code(&bin(&["--config", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&bin(&["--config", bad.to_str().unwrap(), "whitney"])), 1);
}

#[test]
fn csv_format_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["cauchy", "--format", "csv", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let jumps = fs::read_to_string(dir.path().join("cauchy_jump.csv")).unwrap();
    assert!(jumps.starts_with("s,jump_re,jump_im,density_re,density_im,error\n"));
    assert_eq!(jumps.lines().count(), 9);
    assert!(!dir.path().join("cauchy.json").exists());
    let o = bin(&["whitney", "--max-generation", "2", "--format", "csv"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("center_re,center_im,side,generation"));
}

fn round_trip(config: &str) {
    let c = RunConfig::from_json(config).unwrap();
    let doc = execute(&c).unwrap();
    let text = doc.to_json().unwrap();
    let back = Document::from_json(&text).unwrap();
    assert_eq!(back, doc, "{config}");
    assert_eq!(back.to_json().unwrap(), text, "{config}");
}

#[test]
fn every_report_kind_round_trips() {
    round_trip(r#"{"command":"conditions","field":"power_law:0.75","t_sweep":[0,0.5],"a_sweep":[0]}"#);
    round_trip(r#"{"command":"conditions","field":"constant:0.3","t_sweep":[0],"a_sweep":[0]}"#);
    round_trip(r#"{"command":"twb","field":"power_law:0.75","t_sweep":[0,1.7],"a_sweep":[0,-1]}"#);
    round_trip(r#"{"command":"cauchy","curve":"line","density":"indicator:-1,1"}"#);
    round_trip(r#"{"command":"cauchy","density":"omega:2"}"#);
    round_trip(r#"{"command":"whitney","strip":"-1,1,0,1","max_generation":5}"#);
    round_trip(r#"{"command":"theorem1","map":"bump:0.01","probes":"0.3,0.4;1.3,-0.6","line_probes":[0.2]}"#);
    round_trip(r#"{"command":"example5"}"#);
}

#[test]
fn tampered_reports_are_rejected() {
    let doc = execute(&RunConfig::from_json(r#"{"command":"whitney","max_generation":2}"#).unwrap()).unwrap();
    assert_eq!(doc.status, Status::Consistent);
    let text = doc.to_json().unwrap();
    assert!(Document::from_json(&text.replacen("\"schema_version\": 1", "\"schema_version\": 99", 1)).is_err());
    assert!(Document::from_json(&text.replacen("\"command\": \"whitney\"", "\"command\": \"twb\"", 1)).is_err());
    assert!(Document::from_json(&text.replacen("\"total_area\"", "\"area_total\"", 1)).is_err());
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = bin(&["theorem1", "--map", "bump:0.01", "--probes", "0.3,0.4;-0.6,0.8", "--out", d.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(read(&a, "theorem1.json"), read(&b, "theorem1.json"));
}
