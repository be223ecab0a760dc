use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gtclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtclab")).args(args).env_remove("GTCLAB_SEED").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = gtclab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code_of(v: &Value) -> i64 {
    v["code"]["n"].as_i64().unwrap()
}

#[test]
fn distance_examples() {
    let v = json(&["distance", "--l1", "-1,5", "--l2", "-3,2", "--omega", "3", "--oracle"]);
    assert_eq!(v["d_prime"], 8.0);
    assert_eq!(v["agree"], true);
    let v = json(&["distance", "--cyclic", "13,2,1", "--model", "pure-z"]);
    assert_eq!(v["d_prime"], 13.0);
    let v = json(&["distance", "--cyclic", "13,2,1", "--omega", "1"]);
    assert_eq!(v["d_prime"], 5.0);
    let v = json(&["distance", "--l1", "7,5", "--l2", "-2,1", "--omega", "3"]);
    assert_eq!((code_of(&v), v["d_prime"].as_f64().unwrap()), (17, 9.0));
    let v = json(&["distance", "--code", "-1,5,-3,2", "--omega", "1", "--grid-eps", "0.05"]);
    assert_eq!(v["d_prime"], 5.0);
    assert!((v["grid_estimate"].as_f64().unwrap() - 5.0).abs() <= 0.05);
    let v = json(&["distance", "--l1", "3,2", "--l2", "-2,3", "--omega", "2", "--model", "correlated"]);
    let (lo, hi) = (v["correlated_bounds"][0].as_f64().unwrap(), v["correlated_bounds"][1].as_f64().unwrap());
    let d = v["d_prime"].as_f64().unwrap();
    assert!(lo - 1e-9 <= d && d <= hi + 1e-9);
}

#[test]
fn emitted_code_specs_reparse() {
    for args in [["map", "--cyclic", "13,2,1"], ["map", "--cyclic", "17,1,3"], ["map", "--code", "7,5,-2,1"]] {
        let v = json(&args);
        let l1 = format!("{},{}", v["code"]["l1"][0], v["code"]["l1"][1]);
        let l2 = format!("{},{}", v["code"]["l2"][0], v["code"]["l2"][1]);
        let again = json(&["map", "--l1", &l1, "--l2", &l2]);
        assert_eq!(again["canonical_basis"], v["canonical_basis"]);
        assert_eq!(again["code"], v["code"]);
    }
}

#[test]
fn catalog_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.json");
    let out = gtclab(&["catalog", "--omega", "3", "--d-max", "9", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert!(entries.iter().any(|e| e["n"] == 17 && e["d_prime"] == 9.0));

    let v = json(&["catalog", "--omega", "1", "--d-max", "6"]);
    for row in &v["curves"].as_array().unwrap()[1..] {
        let d = row["d_prime"].as_f64().unwrap();
        assert_eq!(row["n_min"].as_f64().unwrap(), (d * d / 2.0).ceil(), "{row}");
    }

    let v = json(&["catalog", "--omega", "1", "--d-target", "7", "--delta", "0"]);
    assert_eq!(v["entries"], Value::Array(vec![]));
}

fn csv_text(args: &[&str]) -> String {
    let out = gtclab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn simulate_fits_the_exponent() {
    let out = gtclab(&[
        "simulate", "--l1", "3,2", "--l2", "-2,3", "--omega", "1", "--p", "0.02:0.08:7", "--trials", "20000",
        "--seed", "11", "--fit", "0.02:0.08",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 8);
    assert!(csv.starts_with("code_id,n,k,d_prime,omega,model,decoder,p,trials,failures,rate,ci_low,ci_high"));
    let fit: Value = serde_json::from_slice(&out.stderr).unwrap();
    let r = fit["r"].as_f64().unwrap();
    assert!((2.0..=4.0).contains(&r), "r = {r}");
}

#[test]
fn runs_are_identical_across_job_counts() {
    let base = ["simulate", "--code", "3,2,-2,3", "--p", "0.03:0.09:3", "--trials", "3000", "--seed", "5"];
    let one = csv_text(&[&base[..], &["--jobs", "1"]].concat());
    let four = csv_text(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one, four);

    let phen = ["simulate", "--code", "3,2,-2,3", "--p", "0.02:0.04:2", "--trials", "500", "--phenomenological"];
    assert_eq!(csv_text(&[&phen[..], &["--jobs", "1"]].concat()), csv_text(&[&phen[..], &["--jobs", "3"]].concat()));

    let thr = ["threshold", "--d-list", "3,5,7", "--p", "0.12:0.26:5", "--trials", "1500", "--seed", "2"];
    let a = gtclab(&[&thr[..], &["--jobs", "1"]].concat());
    let b = gtclab(&[&thr[..], &["--jobs", "2"]].concat());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 16);
    let fit: Value = serde_json::from_slice(&a.stderr).unwrap();
    assert!(fit["p_c"].as_f64().unwrap() > 0.1);
}

#[test]
fn seed_from_environment() {
    let args = ["simulate", "--code", "3,2,-2,3", "--p", "0.1:0.1:1", "--trials", "2000"];
    let env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_gtclab")).args(args).env("GTCLAB_SEED", seed).output().unwrap().stdout
    };
    let flag = csv_text(&[&args[..], &["--seed", "9"]].concat());
    assert_eq!(String::from_utf8(env("9")).unwrap(), flag);
    assert_ne!(env("9"), env("10"));
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn config_file_and_saved_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    write(&cfg, "# distance of the 17-qubit code\nl1 = 7,5\nl2 = -2,1\nomega = 3\n");
    let v = json(&["distance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(v["d_prime"], 9.0);
    let v = json(&["distance", "--config", cfg.to_str().unwrap(), "--omega", "1"]);
    assert_ne!(v["omega"], 3.0);

    let saved = dir.path().join("saved.cfg");
    let csv1 = dir.path().join("a.csv");
    let out = gtclab(&[
        "simulate", "--code", "3,2,-2,3", "--p", "0.04:0.06:2", "--trials", "1000", "--seed", "3", "--out",
        csv1.to_str().unwrap(), "--save-config", saved.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv2 = dir.path().join("b.csv");
    let out = gtclab(&["simulate", "--config", saved.to_str().unwrap(), "--out", csv2.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&csv1).unwrap(), std::fs::read(&csv2).unwrap());

    write(&cfg, "no-such-option = 1\n");
    assert_eq!(gtclab(&["distance", "--code", "3,2,-2,3", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn flagcheck_verdicts() {
    let v = json(&["flagcheck", "--l1", "-1,5", "--l2", "-3,2", "--omega", "3"]);
    assert_eq!(v["verdict"], "PASS");
    let v = json(&["flagcheck", "--cyclic", "5,1,1", "--omega", "1", "--t-prime", "1"]);
    assert_eq!(v["verdict"], "PASS");
    let v = json(&["flagcheck", "--l1", "3,2", "--l2", "-2,3", "--omega", "1", "--no-flags"]);
    assert_eq!(v["verdict"], "FAIL");
    let ce = &v["report"]["counterexamples"][0];
    assert_eq!(ce["e"].as_str().unwrap().len(), 13);
    let v = json(&["flagcheck", "--l1", "3,2", "--l2", "-2,3", "--tables"]);
    assert_eq!(v["tables"]["xi"].as_array().unwrap().len(), 7);
}

#[test]
fn exit_codes() {
    assert_eq!(gtclab(&["distance", "--l1", "1,1", "--l2", "2,2"]).status.code(), Some(2));
    assert_eq!(gtclab(&["simulate", "--code", "3,2,-2,3", "--p", "0.1:0.05:3"]).status.code(), Some(2));
    assert_eq!(gtclab(&["bogus"]).status.code(), Some(2));
    // 41 qubits is beyond the exhaustive engine
    assert_eq!(gtclab(&["distance", "--l1", "5,4", "--l2", "-4,5", "--model", "correlated"]).status.code(), Some(3));
    assert_eq!(
        gtclab(&["flagcheck", "--l1", "3,2", "--l2", "-2,3", "--omega", "1", "--budget", "10"]).status.code(),
        Some(3)
    );
    // two sizes cannot pin a threshold
    let out = gtclab(&["threshold", "--d-list", "3,5", "--p", "0.1:0.2:3", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(gtclab(&["--help"]).status.success());
}
