use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bbm5(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bbm5"))
        .args(args)
        .env_remove("BBM5_OUT_DIR")
        .output()
        .expect("spawn bbm5")
}

fn write_config(dir: &Path, value: Value) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_vec_pretty(&value).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn csv_rows(path: PathBuf) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("missing column {name}"))
}

#[test]
fn coeffs_prints_reference_gamma() {
    let out = bbm5(&["coeffs"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let gamma = v["coefficients"]["gamma"].as_f64().unwrap();
    assert!((gamma - 7.0 / 48.0).abs() < 1e-15);
    for key in ["first_order", "second_order", "coefficients", "rho_star", "violations"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn coeffs_rejects_theta_out_of_range() {
    let out = bbm5(&["coeffs", "--theta", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn coeffs_rho_auto_restores_energy_conservation() {
    let out = bbm5(&["coeffs", "--rho", "0.3", "--rho-auto"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["coefficients"]["energy_conserving"], json!(true));
    let rho = v["parameters"]["rho"].as_f64().unwrap();
    let star = v["rho_star"].as_f64().unwrap();
    assert!((rho - star).abs() < 1e-15);
}

#[test]
fn missing_config_is_a_configuration_error() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.json");
    let out = bbm5(&[
        "simulate",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_a_configuration_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), json!({"simulate": {"horizn": 1.0}}));
    let out = bbm5(&["simulate", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_data_gives_an_all_zero_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        json!({"simulate": {
            "grid": {"n": 32, "length": 10.0},
            "initial": {"kind": "zero"},
            "horizon": 0.1,
            "stepper": {"dt": 0.01},
            "monitors": {"every": 1}
        }}),
    );
    let out_dir = tmp.path().join("out");
    let out = bbm5(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let (header, rows) = csv_rows(out_dir.join("run.csv"));
    assert_eq!(rows.len(), 11);
    let t = col(&header, "t");
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i != t {
                assert_eq!(cell.parse::<f64>().unwrap(), 0.0, "{} = {cell}", header[i]);
            }
        }
    }
    assert!(out_dir.join("run_meta.json").exists());
}

#[test]
fn blow_up_exits_with_numerical_abort() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        json!({"simulate": {
            "grid": {"n": 32, "length": 10.0},
            "initial": {"kind": "gaussian", "amplitude": 1e100, "width": 1.0},
            "horizon": 50.0,
            "stepper": {"dt": 1.0},
            "monitors": {"every": 1}
        }}),
    );
    let out_dir = tmp.path().join("out");
    let out = bbm5(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    // the partial record is still written
    assert!(out_dir.join("run.csv").exists());
}

#[test]
fn split_rejects_s_out_of_range() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), json!({"split": {"s": 2.5}}));
    let out = bbm5(&["split", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_cutoff_split_has_fields_but_no_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        json!({"split": {"grid": {"n": 64, "length": std::f64::consts::TAU}, "cutoffs": [8.0], "stepper": {"dt": 0.005}}}),
    );
    let out_dir = tmp.path().join("out");
    let out = bbm5(&["split", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(out_dir.join("split_sweep.csv"));
    assert_eq!(
        header,
        ["N", "t0", "h_H2", "u_H2_t0", "E_u1_minus_E_ut0", "slope_fit_window"]
    );
    assert_eq!(rows.len(), 1);
    let summary: Value = serde_json::from_slice(&std::fs::read(out_dir.join("split_summary.json")).unwrap()).unwrap();
    assert!(summary["h_fit"].is_null());
}

#[test]
fn multiplier_table_row_at_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bbm5(&["multiplier-table", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(tmp.path().join("multipliers.csv"));
    let xi = col(&header, "xi");
    let psi = col(&header, "psi");
    let row = rows.iter().find(|r| r[xi].parse::<f64>().unwrap() == 1.0).unwrap();
    let v: f64 = row[psi].parse().unwrap();
    assert!((v - 72.0 / 85.0).abs() < 1e-15);
    assert_eq!(format!("{v:.6}"), "0.847059");
    assert!(tmp.path().join("sup_bounds.json").exists());
}

#[test]
fn picard_on_zero_data_converges_at_once() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        json!({"picard": {"grid": {"n": 32, "length": 10.0}, "initial": {"kind": "zero"}, "data_norm": null}}),
    );
    let out = bbm5(&["picard", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = csv_rows(tmp.path().join("picard.csv"));
    assert_eq!(rows.len(), 1);
    let summary: Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("picard_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["iterations"], json!(1));
}

#[test]
fn energy_drift_prediction_vanishes_at_the_conserving_gamma() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        json!({"energy_drift": {
            "grid": {"n": 128, "length": 40.0},
            "horizon": 0.2,
            "stepper": {"dt": 0.01},
            "gamma": null,
            "every": 2
        }}),
    );
    let out = bbm5(&["energy-drift", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(tmp.path().join("energy_drift.csv"));
    assert_eq!(header, ["t", "E", "dEdt", "predicted", "residual"]);
    let p = col(&header, "predicted");
    assert!(rows.iter().all(|r| r[p].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn out_dir_falls_back_to_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_bbm5"))
        .args(["multiplier-table", "--quiet"])
        .env("BBM5_OUT_DIR", tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(tmp.path().join("multipliers.csv").exists());
}

#[test]
fn floats_are_written_with_seventeen_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bbm5(&["multiplier-table", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(tmp.path().join("multipliers.csv"));
    for cell in &rows[7] {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{cell}");
    }
}

#[test]
fn seed_flag_changes_random_data_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        json!({"split": {"grid": {"n": 64, "length": std::f64::consts::TAU}, "cutoffs": [8.0], "stepper": {"dt": 0.005}}}),
    );
    let run = |seed: &str, name: &str| {
        let d = tmp.path().join(name);
        let out = bbm5(&[
            "split",
            "--config",
            &cfg,
            "--seed",
            seed,
            "--out",
            d.to_str().unwrap(),
            "--quiet",
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(d.join("split_sweep.csv")).unwrap()
    };
    let (a, b, c) = (run("1", "a"), run("1", "b"), run("2", "c"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}
