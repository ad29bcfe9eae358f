use std::path::Path;
use std::process::{Command, Output};

use nonunital::adversary::{minimize_negativity_2q, SearchSettings};
use nonunital::optics::imperfect_protocol;
use nonunital::protocols::DiagonalInputParams;
use nonunital_cli::point_seed;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonunital")).args(args).arg("--out").arg(out).output().unwrap()
}

/// Header line and data rows, skipping `#` comments.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>, Vec<String>) {
    let text = std::fs::read_to_string(path).unwrap();
    let comments = text.lines().filter(|l| l.starts_with('#')).map(String::from).collect();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows, comments)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn sweep4q_negativity_is_half_eta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    assert!(run(&["sweep4q", "--p", "0.5"], &out).status.success());
    let (header, rows, comments) = read_csv(&out);
    assert_eq!(header, ["eta", "negativity", "witness_expectation", "analytic_prediction"]);
    assert_eq!(rows.len(), 21);
    assert!(comments.iter().any(|c| c == "# model:ideal"));
    for row in rows {
        let eta: f64 = row[0].parse().unwrap();
        let n: f64 = row[col(&header, "negativity")].parse().unwrap();
        let w: f64 = row[col(&header, "witness_expectation")].parse().unwrap();
        let a: f64 = row[col(&header, "analytic_prediction")].parse().unwrap();
        assert!((n - eta / 2.0).abs() < 1e-10);
        assert!((w + eta / 2.0).abs() < 1e-10);
        assert!((a - eta / 2.0).abs() < 1e-12);
    }
}

#[test]
fn adversary2q_always_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    assert!(run(&["adversary2q", "--restarts", "16"], &out).status.success());
    let (header, rows, _) = read_csv(&out);
    assert_eq!(header, ["eta", "min_negativity", "converged", "restarts_used"]);
    assert_eq!(rows.len(), 21);
    for row in &rows {
        assert!(row[1].parse::<f64>().unwrap() < 1e-6);
        assert_eq!(row[3], "16");
    }
    // any row is recomputable from its inputs
    let k = 13;
    let eta: f64 = rows[k][0].parse().unwrap();
    let again = minimize_negativity_2q(eta, &SearchSettings::new(16, point_seed(0, k))).unwrap();
    assert_eq!(format!("{:.16e}", again.min_negativity + 0.0), rows[k][1]);
}

#[test]
fn calibrate_alpha0_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    assert!(run(&["calibrate", "--steps", "4"], &out).status.success());
    let (header, rows, _) = read_csv(&out);
    assert_eq!(header, ["eta", "alpha0", "alpha1", "alpha2", "survival_probability_at_beta_half"]);
    let etas: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(etas, [0.0, 0.25, 0.5, 0.75, 1.0]);
    for row in &rows {
        let a0: f64 = row[1].parse().unwrap();
        assert!((a0 - 0.425 * 0.425 / 0.575).abs() < 1e-15);
        assert!(row[1].starts_with("3.1413"));
        let survival: f64 = row[4].parse().unwrap();
        assert!((survival - 0.425 * 0.425).abs() < 1e-12);
    }
}

#[test]
fn imperfect_runs_are_labelled_and_recomputable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("i.csv");
    assert!(run(&["sweep4q", "--imperfect", "--steps", "5"], &out).status.success());
    let (_, rows, comments) = read_csv(&out);
    assert!(comments.iter().any(|c| c == "# model:unbalanced-bs"));
    for row in rows {
        let eta: f64 = row[0].parse().unwrap();
        let r = imperfect_protocol(&DiagonalInputParams::default(), eta, 0.575, 0.425).unwrap();
        assert_eq!(row[1], format!("{:.16e}", r.negativity + 0.0));
        let a: f64 = row[3].parse().unwrap();
        assert!((a - r.negativity).abs() < 1e-10);
    }
}

#[test]
fn sweep2q_leaves_witness_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    assert!(run(&["sweep2q", "--steps", "2"], &out).status.success());
    let (_, rows, _) = read_csv(&out);
    assert!(rows.iter().all(|r| r.len() == 4 && r[2].is_empty()));
}

#[test]
fn shots_modes_track_truth() {
    let dir = tempfile::tempdir().unwrap();
    for mode in ["shots2q", "shots4q"] {
        let out = dir.path().join(format!("{mode}.csv"));
        assert!(run(&[mode, "--steps", "2", "--eta-min", "0.4", "--eta-max", "0.8", "--seed", "5"], &out).status.success());
        let (header, rows, _) = read_csv(&out);
        assert_eq!(header, ["eta", "estimate", "sigma", "true_value", "shots"]);
        for row in rows {
            let v: Vec<f64> = row[1..4].iter().map(|s| s.parse().unwrap()).collect();
            assert!(v[1] > 0.0);
            assert!((v[0] - v[2]).abs() < 6.0 * v[1], "{mode}: {row:?}");
            assert_eq!(row[4], "100000");
        }
    }
}

#[test]
fn manifest_records_config_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/run.csv");
    assert!(run(&["sweep4q", "--steps", "3", "--seed", "17", "--q", "0.8"], &out).status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("nested/run.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["library_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config"]["mode"], "sweep4q");
    assert_eq!(manifest["config"]["seed"], 17);
    assert_eq!(manifest["config"]["eta_grid"]["steps"], 3);
    assert_eq!(manifest["config"]["input"]["q"], 0.8);
    assert!(manifest["timestamp_unix"].as_u64().unwrap() > 0);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"steps": 2, "eta_min": 0.2, "eta_max": 0.6, "p": 0.1}"#).unwrap();
    let out = dir.path().join("f.csv");
    let status = run(&["sweep4q", "--config", cfg.to_str().unwrap(), "--eta-max", "1.0"], &out).status;
    assert!(status.success());
    let (_, rows, _) = read_csv(&out);
    let etas: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(etas, [0.2, 0.6, 1.0]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(run(&["nonsense"], &out).status.code(), Some(1));
    assert_eq!(run(&["sweep2q", "--eta-max", "1.5"], &out).status.code(), Some(1));
    assert_eq!(run(&["sweep4q", "--r", "2"], &out).status.code(), Some(1));
    assert_eq!(run(&["shots4q", "--shots", "0"], &out).status.code(), Some(1));
    assert_eq!(run(&["sweep4q", "--config", "/nonexistent/cfg.json"], &out).status.code(), Some(1));
    let bad = run(&["calibrate", "--transmission", "0.3", "--reflection", "0.7"], &out);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error"));
    assert!(!out.exists());
    let help = Command::new(env!("CARGO_BIN_EXE_nonunital")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
