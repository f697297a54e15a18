use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use slowlight::cli::run;
use slowlight::io::{RunManifest, GRID_CSV_HEADER, OUT_DIR_ENV};

const SMALL: &str = r#"{
    "label": "short cell",
    "omega_p0": 5, "omega_c0": 20, "R": 4, "t_d": 11,
    "kappa12": 200, "z_m": 0.5,
    "grid": { "n_x": 460, "n_z": 6 }
}"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn args(parts: &[&str]) -> Vec<String> {
    std::iter::once("slowlight")
        .chain(parts.iter().copied())
        .map(String::from)
        .collect()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slowlight"))
}

#[test]
fn simulate_both_engines_writes_all_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "small.json", SMALL);
    let out = tmp.path().join("run");
    let code = run(args(&[
        "simulate",
        config.to_str().unwrap(),
        "--engine",
        "both",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    for name in [
        "grid_adiabatic.csv",
        "grid_numeric.csv",
        "profiles.csv",
        "summary.json",
        "comparison.json",
        "manifest.json",
    ] {
        assert!(out.join(name).is_file(), "missing {name}");
    }

    let grid = fs::read_to_string(out.join("grid_numeric.csv")).unwrap();
    let mut lines = grid.lines();
    assert_eq!(lines.next().unwrap(), GRID_CSV_HEADER.join(","));
    assert_eq!(lines.count(), 460 * 6);

    let manifest: RunManifest =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.config.z_m, 0.5);
    assert_eq!(manifest.grid.n_x, 460);
    assert!(manifest.outputs.iter().any(|o| o == "comparison.json"));

    let summary: Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["numeric"]["norm_max_dev"].as_f64().unwrap() < 1e-7);
    assert!((summary["adiabatic"]["a3_peak"].as_f64().unwrap() - 1.0 / 17f64.sqrt()).abs() < 1e-5);
    // the stored pulse leaves a half-centimetre cell before the recurrence
    assert!(summary["revival"]["error"]
        .as_str()
        .unwrap()
        .contains("travers"));
}

#[test]
fn csv_output_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "small.json", SMALL);
    let mut grids = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        assert_eq!(
            run(args(&[
                "simulate",
                config.to_str().unwrap(),
                "--out",
                out.to_str().unwrap()
            ])),
            0
        );
        grids.push(fs::read(out.join("grid_numeric.csv")).unwrap());
    }
    assert_eq!(grids[0], grids[1]);
}

#[test]
fn adiabatic_plateau_starts_at_entrance() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "fig02.json",
        r#"{"omega_p0": 5, "omega_c0": 20, "R": 4, "t_d": 11, "kappa12": 200, "z_m": 8,
            "grid": {"n_x": 231, "n_z": 81}}"#,
    );
    let out = tmp.path().join("fig02");
    assert_eq!(
        run(args(&[
            "simulate",
            config.to_str().unwrap(),
            "--engine",
            "adiabatic",
            "--out",
            out.to_str().unwrap()
        ])),
        0
    );

    // |A3| in the storage window: constant in x for every z, and rising
    // from zero at the entrance. Later in the window the recurrence's
    // leading edge starts to move the profile argument again.
    let mut reader = csv::Reader::from_path(out.join("grid_adiabatic.csv")).unwrap();
    let mut by_z = std::collections::BTreeMap::<i64, Vec<f64>>::new();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let x: f64 = rec[0].parse().unwrap();
        let z: f64 = rec[1].parse().unwrap();
        if (4.5..=6.0).contains(&x) {
            by_z.entry((z * 1000.0).round() as i64)
                .or_default()
                .push(rec[10].parse().unwrap());
        }
    }
    let first = by_z.values().next().unwrap();
    assert!(first.iter().all(|&a| a < 1e-6));
    let mut saw_peak = false;
    for col in by_z.values() {
        let (lo, hi) = col
            .iter()
            .fold((f64::MAX, 0.0f64), |(l, h), &a| (l.min(a), h.max(a)));
        assert!(
            hi - lo < 1e-3 / 17f64.sqrt(),
            "plateau not flat: {lo} .. {hi}"
        );
        saw_peak |= (hi - 1.0 / 17f64.sqrt()).abs() < 5e-3;
    }
    assert!(saw_peak);
}

#[test]
fn validation_failure_exits_2_unless_forced() {
    let tmp = tempfile::tempdir().unwrap();
    let weak = write_config(
        tmp.path(),
        "weak.json",
        r#"{"omega_p0": 5, "omega_c0": 4, "kappa12": 200, "z_m": 0.1, "grid": {"n_x": 200, "n_z": 3}}"#,
    );
    let out = tmp.path().join("weak");
    let path = weak.to_str().unwrap();
    assert_eq!(
        run(args(&[
            "simulate",
            path,
            "--engine",
            "adiabatic",
            "--out",
            out.to_str().unwrap()
        ])),
        2
    );
    assert!(!out.exists());
    assert_eq!(
        run(args(&[
            "simulate",
            path,
            "--engine",
            "adiabatic",
            "--out",
            out.to_str().unwrap(),
            "--force"
        ])),
        0
    );
}

#[test]
fn error_taxonomy_maps_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(args(&["simulate", "/nonexistent/config.json"])), 2);
    let bad = write_config(tmp.path(), "bad.json", r#"{"omega_p0": 5}"#);
    assert_eq!(run(args(&["predict", bad.to_str().unwrap()])), 2);
    let weak_r = write_config(
        tmp.path(),
        "r1.json",
        r#"{"omega_p0": 5, "omega_c0": 20, "R": 1, "t_d": 11, "kappa12": 200, "z_m": 8}"#,
    );
    assert_eq!(run(args(&["predict", weak_r.to_str().unwrap()])), 3);
    let small = write_config(tmp.path(), "small.json", SMALL);
    assert_eq!(
        run(args(&[
            "simulate",
            small.to_str().unwrap(),
            "--refine",
            "3"
        ])),
        2
    );
}

#[test]
fn predict_prints_estimate() {
    let tmp = tempfile::tempdir().unwrap();
    let worked = write_config(
        tmp.path(),
        "worked.json",
        r#"{"omega_p0": 5, "omega_c0": 20, "R": 4, "t_d": 11, "kappa12": 200, "z_m": 8}"#,
    );
    let out = bin().arg("predict").arg(&worked).output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["alpha"].as_f64().unwrap() - 2.854598).abs() < 1e-6);
    assert!((v["peak_wp"].as_f64().unwrap() - 10.39).abs() < 0.01);

    let dense = write_config(
        tmp.path(),
        "dense.json",
        r#"{"omega_p0": 20, "omega_c0": 20, "R": 3, "t_d": 11, "kappa12": 700, "z_m": 8}"#,
    );
    let out = bin()
        .args(["predict", "--matched-r"])
        .arg(&dense)
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["matched_R"].as_f64().unwrap() - 2.923).abs() < 1e-3);

    let weak = write_config(
        tmp.path(),
        "weak.json",
        r#"{"omega_p0": 5, "omega_c0": 20, "R": 1, "t_d": 11, "kappa12": 200, "z_m": 8}"#,
    );
    let out = bin().arg("predict").arg(&weak).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.19"));
}

#[test]
fn verify_reference_values_reports_table() {
    let out = bin()
        .args(["verify", "--suite", "reference-values"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS  matched R"), "{text}");
    assert!(
        text.lines()
            .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
            .count()
            >= 13
    );
    // a few printed reference values are rounded differently from the closed form
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn env_var_sets_default_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "envrun.json", SMALL);
    let root = tmp.path().join("outputs");
    let out = bin()
        .args(["simulate", "--engine", "adiabatic"])
        .arg(&config)
        .env(OUT_DIR_ENV, &root)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("envrun"));
    assert!(root.join("envrun").join("manifest.json").is_file());
}

#[test]
fn shipped_configs_load_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for n in 2..=15 {
        let path = dir.join(format!("fig{n:02}.json"));
        let c = slowlight::io::RunConfig::load(&path).unwrap();
        let (pair, medium, grid) = (c.pair().unwrap(), c.medium().unwrap(), c.grid().unwrap());
        let report = slowlight::model::validate_config(&pair, &medium, &grid).unwrap();
        assert!(report.all_passed(), "{}: {:?}", path.display(), report);
    }
}
