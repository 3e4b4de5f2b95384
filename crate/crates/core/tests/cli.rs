use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dfedcata::topology::{build_graph, metropolis_weights, TopologyKind, TopologySpec};
use serde_json::Value;
use tempfile::TempDir;

const MINIMAL: &str = r#"{
    "m": 4, "record_timing": false, "topology": {"kind": "ring"},
    "hyper": {"T": 10, "batch_size": null},
    "problem": {"kind": "quadratic"}
}"#;

fn dfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dfl"))
        .args(args)
        .env_remove("DFL_THREADS")
        .output()
        .expect("spawn dfl")
}

fn write_cfg(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn missing_config_exits_2_naming_path() {
    let out = dfl(&["run", "-c", "/nonexistent/cfg.json", "-o", "/tmp/unused"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/cfg.json"));
}

#[test]
fn minimal_run_writes_header_and_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.json", MINIMAL);
    let o = dir.path().join("out");
    let out = dfl(&["run", "-c", s(&cfg), "-o", s(&o)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(o.join("records.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 11);
    assert_eq!(
        lines[0],
        "round,train_loss,grad_norm_z_sq,consensus,test_accuracy,psi_round,elapsed_ms"
    );
    // quadratic problems have no test set: empty accuracy cell
    assert_eq!(lines[1].split(',').nth(4), Some(""));
    // 17 significant digits
    let loss = lines[1].split(',').nth(1).unwrap();
    let mantissa = loss.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{loss}");
}

#[test]
fn override_is_echoed_in_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.json", MINIMAL);
    let o = dir.path().join("out");
    let out = dfl(&["run", "-c", s(&cfg), "-o", s(&o), "--set", "hyper.beta=0.9"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = read_json(&o.join("summary.json"));
    assert_eq!(summary["resolved_config"]["hyper"]["beta"].as_f64(), Some(0.9));
    assert_eq!(summary["summary"]["status"], "ok");
    assert_eq!(summary["summary"]["records"].as_u64(), Some(10));
}

#[test]
fn rerun_from_summary_is_bitwise_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(
        &dir,
        "c.json",
        r#"{"m": 6, "record_timing": false, "topology": {"kind": "random_dynamic", "n_neighbors": 2},
            "hyper": {"T": 15, "batch_size": 4, "beta": 0.7, "eta": 0.0123456789},
            "problem": {"kind": "logistic", "noise_sigma": 0.1,
                        "data": {"source": {"kind": "blobs", "classes": 3, "d_in": 4, "n": 300}}}}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(dfl(&["run", "-c", s(&cfg), "-o", s(&a)]).status.code(), Some(0));
    let summary = a.join("summary.json");
    assert_eq!(dfl(&["run", "-c", s(&summary), "-o", s(&b)]).status.code(), Some(0));
    assert_eq!(
        std::fs::read(a.join("records.csv")).unwrap(),
        std::fs::read(b.join("records.csv")).unwrap()
    );
    assert_eq!(std::fs::read(&summary).unwrap(), std::fs::read(b.join("summary.json")).unwrap());
}

#[test]
fn unknown_key_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.json", r#"{"m": 4, "topology": {"kind": "ring"}, "hyperr": {}}"#);
    let out = dfl(&["run", "-c", s(&cfg), "-o", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    let cfg = write_cfg(&dir, "d.json", r#"{"m": 4, "topology": {"kind": "ring", "p": 0.3}}"#);
    assert_eq!(dfl(&["run", "-c", s(&cfg), "-o", s(&dir.path().join("o"))]).status.code(), Some(2));
}

#[test]
fn divergence_exits_3_and_keeps_partial_records() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(
        &dir,
        "c.json",
        r#"{"m": 4, "record_timing": false, "topology": {"kind": "ring"},
            "hyper": {"T": 500, "eta": 5.0, "lambda_": 0.0, "beta": 0.0, "batch_size": null, "lr_decay": 1.0},
            "problem": {"kind": "quadratic"}}"#,
    );
    let o = dir.path().join("o");
    let out = dfl(&["run", "-c", s(&cfg), "-o", s(&o)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divergence at round"));
    let rows = std::fs::read_to_string(o.join("records.csv")).unwrap().lines().count() - 1;
    assert!(rows > 0 && rows < 500, "{rows}");
    let summary = read_json(&o.join("summary.json"));
    assert_eq!(summary["summary"]["status"], "diverged");
}

#[test]
fn invalid_thread_env_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.json", MINIMAL);
    let out = Command::new(env!("CARGO_BIN_EXE_dfl"))
        .args(["run", "-c", s(&cfg), "-o", s(&dir.path().join("o"))])
        .env("DFL_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_empty_values_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.json", MINIMAL);
    assert_eq!(dfl(&["sweep", "-c", s(&cfg), "--axis", "beta", "--values", ""]).status.code(), Some(2));
    assert_eq!(dfl(&["sweep", "-c", s(&cfg), "--axis", "nope", "--values", "1"]).status.code(), Some(2));
}

#[test]
fn beta_sweep_rows_are_values_times_seeds() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(
        &dir,
        "c.json",
        r#"{"m": 4, "record_timing": false, "topology": {"kind": "ring"},
            "hyper": {"T": 20, "batch_size": null},
            "problem": {"kind": "quadratic"},
            "sweep": {"seeds": [1, 2, 3], "metric": "grad_norm_z_sq", "threshold": 1.0}}"#,
    );
    let o = dir.path().join("sw");
    let out = dfl(&["sweep", "-c", s(&cfg), "--axis", "beta", "--values", "0,0.5", "-o", s(&o)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(o.join("sweep.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["axis_value", "seed", "rounds_to_threshold", "final_metric", "psi", "status"]
    );
    assert_eq!(rdr.records().count(), 6);
    for v in ["beta=0", "beta=0.5"] {
        for seed in 1..=3 {
            assert!(o.join(v).join(format!("seed-{seed}")).join("records.csv").exists());
        }
    }
}

#[test]
fn topology_sweep_psi_matches_builders() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(
        &dir,
        "c.json",
        r#"{"m": 9, "record_timing": false, "topology": {"kind": "ring"},
            "hyper": {"T": 3, "batch_size": null}, "problem": {"kind": "quadratic"},
            "sweep": {"seeds": [5]}}"#,
    );
    let out = dfl(&["sweep", "-c", s(&cfg), "--axis", "topology", "--values", "ring,grid,full"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    for row in rdr.records() {
        let row = row.unwrap();
        let kind = TopologyKind::from_name(&row[0]).unwrap();
        let expected = metropolis_weights(&build_graph(&TopologySpec::new(kind, 9, 5)).unwrap())
            .unwrap()
            .psi();
        assert_eq!(row[4].parse::<f64>().unwrap(), expected, "{}", &row[0]);
    }
}

#[test]
fn topology_inspect_reports_ring_psi() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.json", MINIMAL);
    let out = dfl(&["topology", "inspect", "-c", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["m"], 4);
    assert_eq!(v["edge_count"], 4);
    assert!((v["psi"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!(v["kappa_psi"].as_f64().unwrap() > 0.0);
    assert_eq!(v["validation"]["sum_preserved"], true);
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let ok = dfl(&["verify"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(text.lines().count() >= 8 && text.lines().all(|l| l.starts_with("PASS")), "{text}");

    let bad = dfl(&["verify", "--perturb-mixing", "1e-4"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8_lossy(&bad.stdout);
    let line = text.lines().find(|l| l.contains("double stochasticity")).unwrap();
    assert!(line.starts_with("FAIL"), "{line}");
}

#[test]
fn analyze_records_and_stability() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(
        &dir,
        "c.json",
        r#"{"m": 4, "record_timing": false, "topology": {"kind": "ring"},
            "hyper": {"T": 40, "batch_size": 4, "beta": 0.5},
            "problem": {"kind": "logistic",
                        "data": {"source": {"kind": "blobs", "classes": 3, "d_in": 4, "n": 200},
                                 "partition": {"kind": "iid"}}}}"#,
    );
    let o = dir.path().join("o");
    assert_eq!(dfl(&["run", "-c", s(&cfg), "-o", s(&o)]).status.code(), Some(0));
    let out = dfl(&["analyze", "--records", s(&o.join("records.csv")), "--threshold", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["records"], 40);
    assert!(v[0]["rate_fit"].is_number());
    assert_eq!(v[0]["rounds_to_threshold"], 1);

    let out = dfl(&["analyze", "--stability", "-c", s(&cfg), "--probe-size", "16", "--rounds", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["delta"].as_array().unwrap().len(), 10);
    assert_eq!(v["identical_before_tau0"], true);

    let missing = dfl(&["analyze", "--records", "/nonexistent.csv"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn help_documents_defaults() {
    let out = dfl(&["run", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["hyper.eta", "[0.1]", "[0.998]", "[0.99]", "random_dynamic, 10", "DFL_THREADS"] {
        assert!(text.contains(needle), "missing {needle}");
    }
}

#[test]
fn defaults_command_prints_valid_config() {
    let out = dfl(&["defaults"]);
    assert_eq!(out.status.code(), Some(0));
    let cfg = dfedcata::config::RunConfig::from_json_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(cfg.m, 100);
    assert_eq!(cfg.hyper.beta, 0.99);
}
