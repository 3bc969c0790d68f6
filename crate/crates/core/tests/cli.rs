//! The `boconserve` binary end to end: exit codes, determinism, and report
//! files against the shipped schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

use boconserve::experiments::ExperimentConfig;

const SMOKE: &str = include_str!("../configs/smoke.json");

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_boconserve"));
    c.env("BOCONSERVE_THREADS", "2");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn smoke() -> Value {
    serde_json::from_str(SMOKE).unwrap()
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let p = dir.join("config.in.json");
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn zero_data(mut cfg: Value) -> Value {
    cfg["initial_data"] = json!({ "inline": { "band_limit": 4, "modes": [] } });
    cfg
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, instance: &Value) {
    if let Err(e) = jsonschema::validate(&schema(schema_name), instance) {
        panic!("{schema_name}: {e} at {}", e.instance_path());
    }
}

fn cmd(sub: &str, config: &Path, out: &Path) -> Output {
    run(&[sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn shipped_config_matches_schema_and_round_trips() {
    assert_valid("config.schema.json", &smoke());
    let cfg = ExperimentConfig::from_json(SMOKE).unwrap();
    let again: Value = serde_json::from_str(&cfg.to_json().unwrap()).unwrap();
    assert_valid("config.schema.json", &again);
}

#[test]
fn evolve_zero_data_and_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &zero_data(smoke()));
    let out = dir.path().join("run");
    assert_eq!(code(&cmd("evolve", &cfg, &out)), 0);
    let snaps = out.join("trajectory");
    let mut names: Vec<_> = std::fs::read_dir(&snaps).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for p in names.iter().filter(|p| p.file_name().unwrap() != "metadata.json") {
        let f = boconserve::fourier::CoefficientFile::read(p).unwrap().to_function().unwrap();
        assert!(f.is_zero(), "{}", p.display());
    }
    let first: Vec<Vec<u8>> = names.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(code(&cmd("evolve", &cfg, &out)), 0);
    let second: Vec<Vec<u8>> = names.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(first, second);
}

#[test]
fn evolve_seed_override_changes_data() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &smoke());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&cmd("evolve", &cfg, &a)), 0);
    let o = run(&["evolve", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "--seed", "8"]);
    assert_eq!(code(&o), 0);
    let first = |d: &Path| std::fs::read(d.join("trajectory").join("00000000.json")).unwrap();
    assert_ne!(first(&a), first(&b));
}

#[test]
fn conservation_reports_validate_and_embed_hash() {
    let dir = TempDir::new().unwrap();
    let cfg_path = write_config(dir.path(), &smoke());
    let out = dir.path().join("run");
    let o = cmd("conservation", &cfg_path, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read_json(&out.join("summary.json"));
    assert_valid("conservation_summary.schema.json", &summary);
    let cfg = ExperimentConfig::from_json(SMOKE).unwrap();
    assert_eq!(summary["header"]["config_hash"], json!(cfg.hash()));
    assert!(summary["summary"]["alpha_drift_pass"].as_bool().unwrap());

    let mut rdr = csv::Reader::from_path(out.join("conservation.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "t", "alpha", "hs_squared", "t_form", "besov_s-0.25_r2", "besov_s-0.25_r1", "besov_s-0.25_rinf", "mean", "l2",
            "tail_fraction"
        ]
    );
    let times: Vec<f64> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]));
    let dat = std::fs::read_to_string(out.join("alpha.dat")).unwrap();
    assert!(dat.starts_with("# t alpha\n"));
    assert_eq!(dat.lines().count(), times.len() + 1);
}

#[test]
fn conservation_of_zero_data_has_no_drift() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &zero_data(smoke()));
    let out = dir.path().join("run");
    assert_eq!(code(&cmd("conservation", &cfg, &out)), 0);
    let s = read_json(&out.join("summary.json"));
    assert_eq!(s["summary"]["max_alpha_drift"], json!(0.0));
    assert_eq!(s["summary"]["max_hs_ratio"], json!(1.0));
}

#[test]
fn kappa_below_threshold_exits_3() {
    let dir = TempDir::new().unwrap();
    let mut cfg = smoke();
    cfg["initial_data"]["random_rough"]["target_hs"] = Value::Null;
    cfg["initial_data"]["random_rough"]["amplitude"] = json!(30.0);
    cfg["kappa_policy"] = json!({ "fixed": 1.0 });
    let cfg = write_config(dir.path(), &cfg);
    let o = cmd("conservation", &cfg, &dir.path().join("run"));
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("raise κ"));
}

#[test]
fn blowup_exits_2() {
    let dir = TempDir::new().unwrap();
    let mut cfg = smoke();
    cfg["initial_data"]["random_rough"]["target_hs"] = Value::Null;
    cfg["initial_data"]["random_rough"]["amplitude"] = json!(20.0);
    cfg["solver"] = json!({
        "M": 16, "dt": 0.5, "T": 5.0, "integrator": "etdrk4", "dealias": false,
        "snapshot_every": 1, "tail_limit": null
    });
    let cfg = write_config(dir.path(), &cfg);
    assert_eq!(code(&cmd("evolve", &cfg, &dir.path().join("run"))), 2);
}

#[test]
fn config_errors_exit_4_with_field_path() {
    let dir = TempDir::new().unwrap();
    let mut cfg = smoke();
    cfg["solver"]["dt"] = json!("fast");
    let path = write_config(dir.path(), &cfg);
    let o = cmd("evolve", &path, &dir.path().join("run"));
    assert_eq!(code(&o), 4);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("solver.dt"), "{err}");
    assert!(err.contains("line"), "{err}");

    let mut cfg = smoke();
    cfg["surprise"] = json!(1);
    let o = cmd("evolve", &write_config(dir.path(), &cfg), &dir.path().join("run"));
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("surprise"));

    assert_eq!(code(&run(&["verify", "--suite", "nope"])), 4);
    let o = bin().env("BOCONSERVE_THREADS", "0").args(["verify", "--suite", "line"]).output().unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn verify_line_suite_passes_and_validates() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v");
    let o = run(&["verify", "--suite", "line", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read_json(&out.join("verify_summary.json"));
    assert_valid("verify_summary.schema.json", &summary);
    assert_eq!(summary["total"], json!(6));
    assert!(!out.join("verify_failures.csv").exists());
    let mut rdr = csv::Reader::from_path(out.join("verify.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["name", "kappa", "dim", "ell", "seed", "residual", "scale", "tolerance", "relative", "pass", "skipped"]
    );
}

#[test]
fn two_sided_report_validates_and_zero_data_gives_unit_ratios() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let o = cmd("two-sided", &write_config(dir.path(), &smoke()), &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("two_sided.json"));
    assert_valid("two_sided.schema.json", &r);
    for b in r["bounds"].as_array().unwrap() {
        assert_eq!(b["flagged"], json!(0));
    }

    let out = dir.path().join("zero");
    assert_eq!(code(&cmd("two-sided", &write_config(dir.path(), &zero_data(smoke())), &out)), 0);
    let r = read_json(&out.join("two_sided.json"));
    assert!(r["rows"].as_array().unwrap().iter().all(|row| row["ratio"] == json!(1.0)));
}

#[test]
fn galilei_report_validates_and_zero_boost_is_exact() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let o = cmd("galilei", &write_config(dir.path(), &smoke()), &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("galilei.json"));
    assert_valid("galilei.schema.json", &r);
    assert!(r["pass"].as_bool().unwrap());

    let mut cfg = smoke();
    cfg["galilei_mu"] = json!(0.0);
    let out = dir.path().join("mu0");
    assert_eq!(code(&cmd("galilei", &write_config(dir.path(), &cfg), &out)), 0);
    assert_eq!(read_json(&out.join("galilei.json"))["max_discrepancy"], json!(0.0));
}
