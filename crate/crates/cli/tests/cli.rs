use std::path::PathBuf;
use std::process::{Command, Output};

use fincov::{nnd_pdf, NetworkParams};

fn fincov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fincov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fincov-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn nnd_grid_matches_library_bitwise() {
    let out = fincov(&["nnd", "--b", "0", "--r", "0", "--d1-max", "5", "--steps", "200"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,d1,pdf"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 200);

    let p = NetworkParams::default();
    for (i, row) in rows.iter().enumerate() {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[0], 0.0);
        assert_eq!(f[1].to_bits(), (5.0 * (i + 1) as f64 / 200.0).to_bits());
        assert_eq!(f[2].to_bits(), nnd_pdf(0.0, f[1], &p).unwrap().to_bits(), "row {i}");
    }
}

#[test]
fn nnd_presets_are_labelled() {
    let text = stdout(&fincov(&["nnd", "--r", "1", "--steps", "3"]));
    let labels: Vec<_> = text.lines().filter(|l| l.starts_with('#')).collect();
    assert_eq!(labels, ["# preset=uniform b=0.0", "# preset=concave b=-0.08", "# preset=convex b=0.08"]);
}

#[test]
fn laplace_shape() {
    let out = fincov(&["laplace", "--b", "0.04", "--steps", "5", "--d1", "0.5,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,d1,laplace"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[2] > 0.0 && r[2] <= 1.0));
}

#[test]
fn coverage_shape() {
    let out = fincov(&["coverage", "--lambda0", "1", "--eta", "4", "--preset", "uniform,convex", "--r", "0,2.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,b,eta,lambda0,coverage,err_estimate"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r[4])));
}

#[test]
fn optimize_small_sweep() {
    let out = fincov(&["optimize", "--lambda0", "1", "--eta", "4", "--beta", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("beta,eta,lambda0,b_star,cbar"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!(row[3].abs() <= 0.08 && row[4] > 0.0 && row[4] < 1.0);
    assert!(lines.next().is_none());
}

#[test]
fn simulate_requires_seed() {
    let out = fincov(&["simulate", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--seed", "9", "--trials", "3000", "--r", "4", "--b", "-0.04"];
    let a = fincov(&args);
    let b = fincov(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, fincov(&["simulate", "--seed", "10", "--trials", "3000", "--r", "4", "--b", "-0.04"]).stdout);
}

#[test]
fn validate_passes_by_default() {
    let out = fincov(&["validate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(!text.contains("FAIL"));
    assert!(text.lines().any(|l| l.starts_with("INFO printed centre closed form")));
}

#[test]
fn out_of_range_shape_is_usage_error() {
    for cmd in ["validate", "nnd", "coverage"] {
        let out = fincov(&[cmd, "--b", "0.5"]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
    }
    assert_eq!(fincov(&["nnd", "--r", "6"]).status.code(), Some(2));
    assert_eq!(fincov(&["nnd", "--bogus"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_and_manifest_is_written() {
    let dir = scratch("config");
    let config = dir.join("run.cfg");
    let csv = dir.join("pdf.csv");
    std::fs::write(&config, "# test run\nR = 4\nb = 0.1\nsteps = 7\nr = 1\n").unwrap();
    let out = fincov(&[
        "nnd",
        "--config",
        config.to_str().unwrap(),
        "--b",
        "-0.05",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 8);
    let manifest = std::fs::read_to_string(dir.join("pdf.csv.manifest")).unwrap();
    assert!(manifest.contains("R = 4.0\n"));
    assert!(manifest.contains("b = -0.05\n"));
    assert!(manifest.contains("steps = 7\n"));
    assert!(manifest.contains("d1-max = 8.0\n"));

    std::fs::write(&config, "colour = blue\n").unwrap();
    let out = fincov(&["nnd", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(dir).ok();
}
