use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn adlab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_adlab"));
    cmd.args(args).env_remove("ADLAB_THREADS");
    if let Some(n) = threads {
        cmd.env("ADLAB_THREADS", n);
    }
    cmd.output().expect("binary runs")
}

fn run(scenario: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![scenario, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    adlab(&args, None)
}

/// Copy of a shipped config with some top-level sections replaced.
fn edited(dir: &TempDir, name: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut value: Value = serde_json::from_str(&fs::read_to_string(configs().join(name)).unwrap()).unwrap();
    edit(&mut value);
    let path = dir.path().join(name);
    fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
    path
}

fn summary(out: &Path, scenario: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join(format!("{scenario}.summary.json"))).unwrap()).unwrap()
}

fn csv_rows(out: &Path, scenario: &str) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(out.join(format!("{scenario}.csv"))).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

#[test]
fn empty_config_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, "").unwrap();
    let out = run("transfer", &empty, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid config"));
}

#[test]
fn bad_invocations_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let config = configs().join("transfer.json");
    assert_eq!(run("teleport", &config, dir.path(), &[]).status.code(), Some(2));
    assert_eq!(run("transfer", &dir.path().join("missing.json"), dir.path(), &[]).status.code(), Some(2));
    assert_eq!(run("revivals", &config, dir.path(), &["--trials", "5"]).status.code(), Some(2));
    let threads = adlab(&["transfer", "--config", config.to_str().unwrap()], Some("zero"));
    assert_eq!(threads.status.code(), Some(2));
    // Revivals need Lorentzian noise.
    assert_eq!(run("revivals", &configs().join("ncycle.json"), dir.path(), &[]).status.code(), Some(2));
}

#[test]
fn revivals_end_at_the_initial_coherence() {
    let dir = TempDir::new().unwrap();
    let config = edited(&dir, "revivals.json", |v| v["grids"]["time_points"] = 41.into());
    let out = run("revivals", &config, dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path(), "revivals");
    assert_eq!(s["version"], "0.1.0");
    assert_eq!(s["config"]["scenario"], "revivals");
    let initial = s["results"]["initial_abs"].as_f64().unwrap();
    for trace in s["results"]["traces"].as_array().unwrap() {
        let end = trace["final_abs"].as_f64().unwrap();
        if trace["gamma"].as_f64().unwrap() == 0.0 {
            assert!((end - initial).abs() < 1e-12);
        } else {
            assert!(end > 0.0 && end < initial);
        }
    }
    let (header, rows) = csv_rows(dir.path(), "revivals");
    assert_eq!(header, "nu0 [rad/time],gamma [1/time],t [time],re [1],im [1],abs [1]");
    assert_eq!(rows.len(), 6 * 41);
}

#[test]
fn ncycle_orders_loop_counts() {
    let dir = TempDir::new().unwrap();
    let out = run("ncycle", &configs().join("ncycle.json"), dir.path(), &[]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(dir.path(), "ncycle");
    assert_eq!(header, "t_f [time],n [loops],F [1],exponent [1]");
    let kappa = 1e5;
    for block in rows.chunks(4) {
        let f: Vec<f64> = block.iter().map(|r| r[2].parse().unwrap()).collect();
        let n: Vec<&str> = block.iter().map(|r| r[1].as_str()).collect();
        assert_eq!(n, ["0", "1", "2", "4"]);
        let t_f: f64 = block[0][0].parse().unwrap();
        assert!(f[3] >= f[1], "n = 4 below n = 1 at t_f = {t_f}");
        if kappa * t_f < 1.0 {
            assert!(f[3] >= f[2] && f[2] >= f[1] && f[1] >= f[0]);
        }
    }
    assert_eq!(summary(dir.path(), "ncycle")["results"]["short_time_ordering_holds"], true);
}

#[test]
fn summary_echoes_the_resolved_config() {
    let dir = TempDir::new().unwrap();
    let out = run("phase-gate", &configs().join("phase-gate.json"), dir.path(), &["--seed", "77"]);
    assert!(out.status.success());
    let s = summary(dir.path(), "phase-gate");
    assert_eq!(s["config"]["oracle"]["seed"], 77);
    assert_eq!(s["config"]["output"], dir.path().to_str().unwrap());
    assert!(s["results"]["error"].as_f64().unwrap().abs() < 1e-8);
    // The echoed config is itself a valid input.
    let echoed = dir.path().join("echo.json");
    fs::write(&echoed, s["config"].to_string()).unwrap();
    let again = TempDir::new().unwrap();
    assert!(run("phase-gate", &echoed, again.path(), &[]).status.success());
    assert_eq!(
        fs::read(dir.path().join("phase-gate.csv")).unwrap(),
        fs::read(again.path().join("phase-gate.csv")).unwrap()
    );
}

#[test]
fn oracle_compare_is_byte_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let config = edited(&dir, "oracle-compare.json", |v| {
        v["oracle"]["trials"] = 400.into();
        v["oracle"]["grid_points"] = 513.into();
    });
    let mut csvs = Vec::new();
    for (k, threads) in [Some("1"), Some("3"), None].into_iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let mut args = vec!["oracle-compare", "--config", config.to_str().unwrap(), "--out", out_dir.to_str().unwrap()];
        args.extend(["--seed", "5"]);
        let out = adlab(&args, threads);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        csvs.push(fs::read(out_dir.join("oracle-compare.csv")).unwrap());
    }
    assert!(csvs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn oracle_mismatch_exits_with_three() {
    let dir = TempDir::new().unwrap();
    // A gap this small is far from adiabatic, so the ODE transfer misses.
    let config = edited(&dir, "oracle-compare.json", |v| {
        v["protocol"]["gap"] = 3.0.into();
        v["oracle"]["trials"] = 200.into();
        v["oracle"]["grid_points"] = 257.into();
    });
    let out = run("oracle-compare", &config, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    let (_, rows) = csv_rows(dir.path(), "oracle-compare");
    let fidelity = rows.iter().find(|r| r[0] == "transfer_fidelity").unwrap();
    assert_eq!(fidelity[5], "false");
}

#[test]
fn infeasible_optimum_exits_with_four() {
    let dir = TempDir::new().unwrap();
    let config = edited(&dir, "optimize.json", |v| v["optimize"]["cutoff"] = 3.into());
    let out = run("optimize", &config, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no feasible path"));
}

#[test]
fn every_shipped_config_runs() {
    let dir = TempDir::new().unwrap();
    for scenario in ["transfer", "optimize", "validate"] {
        let out = run(scenario, &configs().join(format!("{scenario}.json")), dir.path(), &[]);
        assert!(out.status.success(), "{scenario}");
        assert!(dir.path().join(format!("{scenario}.summary.json")).exists());
    }
    let s = summary(dir.path(), "optimize");
    assert_eq!(s["results"]["coefficients"]["a"], serde_json::json!([0.2, 0.8]));
    let (header, _) = csv_rows(dir.path(), "transfer");
    assert_eq!(header, "t [time],re [1],im [1],abs [1]");
}
