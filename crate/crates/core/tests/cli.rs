use std::process::{Command, Output};

use serde_json::Value;

fn qpoisson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpoisson")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn trivial_solve() {
    let v = json(&qpoisson(&["solve", "--n", "1", "--b", "1.0"]));
    assert_eq!(v["solution"][0].as_f64().unwrap(), 1.0);
    assert_eq!(v["config"]["i"], 4);
}

#[test]
fn table1_small_solution() {
    let v = json(&qpoisson(&["solve", "--preset", "table1-3x3", "--f", "8", "--l", "16", "--backend", "exact"]));
    let sol: Vec<f64> = v["solution"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in sol.iter().zip([0.553, 0.674, 0.490]) {
        assert!((a - b).abs() < 1e-3, "{sol:?}");
    }
}

#[test]
fn sampled_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let run = || {
        let out = qpoisson(&[
            "solve", "--preset", "table1-3x3", "--l", "10", "--backend", "sample", "--shots", "20000", "--seed", "11",
            "--output", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(&path).unwrap()
    };
    let a = run();
    assert_eq!(a, run());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["shots"], 20000);
    assert_eq!(v["rng"], "ChaCha8");
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"preset": "table1-3x3", "f": 4, "l": 10, "format": "csv"}"#).unwrap();
    let out = qpoisson(&["sweep", "--config", cfg.to_str().unwrap(), "--f-values", "0,4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config="));
    assert!(lines[0].contains("\"l\":10"));
    assert_eq!(
        lines[1],
        "problem,f,l,mode,rel_error,sp_expected,sp_analytic_truncated,sp_analytic_exact,qubits,depth,cnots_est"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("3x3,0,10,"));
}

#[test]
fn phase_verification_bins() {
    let v = json(&qpoisson(&["verify-phase", "--preset", "table1-3x3", "--eigen", "2"]));
    let bins = v["bins"].as_array().unwrap();
    assert_eq!(bins.len(), 1);
    assert_eq!(bins[0]["bitstring"], "100000");
    assert!((bins[0]["probability"].as_f64().unwrap() - 1.0).abs() < 1e-10);

    let v = json(&qpoisson(&["verify-phase", "--vector", "1,0,0"]));
    let got: Vec<(u64, f64)> = v["bins"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| (b["value"].as_u64().unwrap(), b["probability"].as_f64().unwrap()))
        .collect();
    assert_eq!(got.iter().map(|g| g.0).collect::<Vec<_>>(), vec![9, 32, 54]);
    for ((_, p), want) in got.iter().zip([0.25, 0.5, 0.25]) {
        assert!((p - want).abs() < 1e-10);
    }

    let v = json(&qpoisson(&["verify-phase", "--b", "1.0"]));
    assert_eq!(v["bins"].as_array().unwrap().len(), 1);
}

#[test]
fn resources_rows() {
    let out = qpoisson(&["resources", "--sizes", "3,7,15", "--f", "8", "--mode", "fused", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let qubits: Vec<&str> = text.lines().skip(2).map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(qubits, vec!["17", "20", "23"]);
}

#[test]
fn zero_noise_mitigation() {
    let dir = tempfile::tempdir().unwrap();
    let noise = dir.path().join("noise.json");
    std::fs::write(&noise, r#"{"0": {"p01": 0.0, "p10": 0.0}, "1": {"p01": 0.0, "p10": 0.0}}"#).unwrap();
    let v = json(&qpoisson(&[
        "mitigate-demo", "--preset", "table1-3x3", "--shots", "100000", "--noise", noise.to_str().unwrap(),
    ]));
    let before = v["rel_error_unmitigated"].as_f64().unwrap();
    let after = v["rel_error_mitigated"].as_f64().unwrap();
    assert!(before < 1.0 && after < 1.0, "{before} {after}");
    assert!((before - after).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    let out = qpoisson(&["solve", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));

    let out = qpoisson(&["solve", "--preset", "table1-15x15", "--f", "8", "--mode", "explicit"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let out = qpoisson(&["solve", "--b", "1,2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = qpoisson(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
