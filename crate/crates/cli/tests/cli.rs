//! End-to-end tests of the `spinbus` binary: config parsing in both formats,
//! artifact layout, warnings, error paths, and manifest reruns.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinbus"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn spinbus");
    assert!(
        out.status.success(),
        "spinbus {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("spawn spinbus");
    assert!(
        !out.status.success(),
        "spinbus {args:?} unexpectedly succeeded"
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SPECTRUM_TOML: &str = "\
k = 3
vectors = false

[system]
n_sites = 5
boundary = \"open\"
j0 = 1.0
b0 = 0.0
";

#[test]
fn spectrum_runs_from_toml_and_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.toml", SPECTRUM_TOML);
    let out = dir.path().join("out");
    run_ok(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);

    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("level,energy,sz,sector_dim\n"));
    assert_eq!(csv.lines().count(), 4, "header plus k = 3 levels");

    let spectrum = read_json(&out.join("spectrum.json"));
    let e0 = spectrum["levels"][0]["energy"].as_f64().unwrap();
    assert!((e0 - (-1.92788625331799)).abs() < 1e-10);

    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "spectrum");
    assert_eq!(manifest["config"]["system"]["n_sites"], 5);
    assert!(manifest["versions"]["spinbus-cli"].is_string());
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(manifest["warnings"], Value::Array(vec![]));
}

#[test]
fn json_config_gives_identical_artifacts() {
    let dir = TempDir::new().unwrap();
    let toml_cfg = write(dir.path(), "cfg.toml", SPECTRUM_TOML);
    let json_cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"system": {"n_sites": 5, "boundary": "open", "j0": 1.0, "b0": 0.0},
            "k": 3, "vectors": false}"#,
    );
    let out_t = dir.path().join("from_toml");
    let out_j = dir.path().join("from_json");
    run_ok(&["spectrum", "--config", toml_cfg.to_str().unwrap(), "--out", out_t.to_str().unwrap()]);
    run_ok(&["spectrum", "--config", json_cfg.to_str().unwrap(), "--out", out_j.to_str().unwrap()]);
    for name in ["spectrum.csv", "spectrum.json"] {
        assert_eq!(
            fs::read(out_t.join(name)).unwrap(),
            fs::read(out_j.join(name)).unwrap(),
            "{name} differs between TOML and JSON configs"
        );
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "[system]\nn_sites = 5\nb0 = 0.0\nnum_sites_typo = 7\n\nk = 3\n",
    );
    let stderr = run_err(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(stderr.contains("unknown field"), "stderr: {stderr}");
}

#[test]
fn manifest_of_another_command_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.toml", SPECTRUM_TOML);
    let out = dir.path().join("out");
    run_ok(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let stderr = run_err(&[
        "scaling",
        "--config",
        out.join("manifest.json").to_str().unwrap(),
        "--out",
        dir.path().join("out2").to_str().unwrap(),
    ]);
    assert!(
        stderr.contains("manifest of the 'spectrum' command"),
        "stderr: {stderr}"
    );
}

#[test]
fn ensemble_without_a_seed_is_an_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "n_sites = 3\nsigma_j = 0.1\nn_samples = 5\nobservables = [\"e0\"]\n",
    );
    let stderr = run_err(&[
        "ensemble",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(stderr.contains("--seed"), "stderr: {stderr}");
}

#[test]
fn scaling_beyond_the_size_cap_is_an_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.toml", "n_min = 2\nn_max = 25\n");
    let stderr = run_err(&[
        "scaling",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(stderr.contains("exceeds the sweep cap"), "stderr: {stderr}");
}

#[test]
fn oversized_k_is_clamped_with_a_warning() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "k = 100\n\n[system]\nn_sites = 3\nb0 = 0.0\n",
    );
    let out = dir.path().join("out");
    run_ok(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let spectrum = read_json(&out.join("spectrum.json"));
    assert_eq!(spectrum["levels"].as_array().unwrap().len(), 8);
    let manifest = read_json(&out.join("manifest.json"));
    let warnings = manifest["warnings"].as_array().unwrap();
    assert!(
        warnings.iter().any(|w| w.as_str().unwrap().contains("clamp")),
        "warnings: {warnings:?}"
    );
}

#[test]
fn explicit_fields_cannot_be_swept() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "[system]\nn_sites = 3\nfields = [0.1, 0.2, 0.3]\n\n\
         [sweep]\nb_min = 0.0\nb_max = 0.5\nsteps = 11\n",
    );
    let stderr = run_err(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(stderr.contains("field sweep"), "stderr: {stderr}");
}

#[test]
fn sweep_finds_the_level_crossing() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "k = 4\n\n[system]\nn_sites = 7\nb0 = 0.0\n\n\
         [sweep]\nb_min = 0.0\nb_max = 0.5\nsteps = 51\nlevels = 4\n\n\
         [sweep.crossing]\nlevel_a = 2\nlevel_b = 3\ntol = 1e-2\n",
    );
    let out = dir.path().join("out");
    run_ok(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);

    let sweep = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("b0,E0,E1,E2,E3\n"));
    assert_eq!(sweep.lines().count(), 52);

    let report = read_json(&out.join("crossings.json"));
    let crossings = report["crossings"].as_array().unwrap();
    // The pair touches trivially at zero field (degenerate pair) and crosses
    // for real near b0 = 0.33; both minima must be reported.
    assert!(
        crossings
            .iter()
            .any(|c| c["b0"].as_f64().unwrap().abs() < 1e-6),
        "zero-field degeneracy missing: {report}"
    );
    assert!(
        crossings
            .iter()
            .any(|c| (c["b0"].as_f64().unwrap() - 0.3275).abs() < 0.02),
        "field crossing missing: {report}"
    );
}

#[test]
fn manifest_rerun_reproduces_every_artifact() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "n_sites = 5\nb0 = 0.1\nsigma_j = 0.1\nsigma_b = 0.05\nn_samples = 25\n\
         observables = [\"e0\", \"d01\", \"m_total\", \"fidelity\"]\n",
    );
    let out1 = dir.path().join("first");
    let out2 = dir.path().join("rerun");
    run_ok(&[
        "ensemble",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out1.to_str().unwrap(),
        "--seed",
        "31",
    ]);
    run_ok(&[
        "ensemble",
        "--config",
        out1.join("manifest.json").to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    for name in ["ensemble.csv", "summary.json"] {
        assert_eq!(
            fs::read(out1.join(name)).unwrap(),
            fs::read(out2.join(name)).unwrap(),
            "{name} differs after manifest rerun"
        );
    }
    // The rerun carries the seed forward through the embedded config.
    let manifest = read_json(&out2.join("manifest.json"));
    assert_eq!(manifest["config"]["master_seed"], 31);
}

#[test]
fn thread_count_resolution_prefers_flag_over_env() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.toml", SPECTRUM_TOML);
    let out = dir.path().join("out");
    let output = bin()
        .env("SPINBUS_THREADS", "2")
        .args([
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            "1",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["threads"], 1, "flag must beat the environment");
}

#[test]
fn csv_only_format_skips_json_reports() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.toml", SPECTRUM_TOML);
    let out = dir.path().join("out");
    run_ok(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.join("spectrum.csv").exists());
    assert!(!out.join("spectrum.json").exists());
    // The manifest is not an optional report; it always exists.
    assert!(out.join("manifest.json").exists());
}

#[test]
fn effective_reports_the_three_site_moments() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "site_a = 1\nsite_b = 3\n\n[system]\nn_sites = 3\nb0 = 0.0\n",
    );
    let out = dir.path().join("out");
    run_ok(&["effective", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let report = read_json(&out.join("effective.json"));
    let moments: Vec<f64> = report["moments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let expect = [2.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0];
    for (m, e) in moments.iter().zip(expect) {
        assert!((m - e).abs() < 1e-10, "moments: {moments:?}");
    }
    // Zero field: the transverse and longitudinal couplings coincide.
    let zz = report["k2"]["zz"].as_f64().unwrap();
    let xx = report["k2"]["xx"].as_f64().unwrap();
    assert!((zz - xx).abs() < 1e-10);
}

#[test]
fn identical_probe_sites_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "site_a = 2\nsite_b = 2\ncouplings = [0.02, 0.01]\n\n[system]\nn_sites = 4\nb0 = 0.0\n",
    );
    let stderr = run_err(&[
        "validate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(stderr.contains("must differ"), "stderr: {stderr}");
}
