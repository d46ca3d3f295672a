use std::fs;
use std::process::Command;

use muspec::figio::Manifest;
use muspec_cli::{run, EXIT_CONTRADICTED, EXIT_ERROR, EXIT_OK};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("muspec").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn spectrum_of_rank_one_geometric() {
    let (code, out, _) = call(&["spectrum", "--func", "geometric:1", "--l", "1", "--m", "2"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), -2.0);
    assert_eq!(rows[1][3], "0");
    assert_eq!(rows[1][4], "ZERO");
}

#[test]
fn version5_on_exponential_passes() {
    let (code, out, err) = call(&["check", "v5", "--func", "exponential", "--l", "1", "--m-max", "8"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["check"], "v5");
    assert_eq!(v["m_grid"].as_array().unwrap().len(), 8);
}

#[test]
fn contradicted_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let wl = dir.path().join("w.json");
    fs::write(&wl, r#"{"constants": {"1": {"W": "5", "provenance": "wrong on purpose"}}}"#).unwrap();
    let wl = wl.to_str().unwrap();
    let (code, out, _) = call(&["check", "v3", "--func", "exponential", "--m-max", "8", "--wl-file", wl]);
    assert_eq!(code, EXIT_CONTRADICTED, "{out}");
    let (code, out, _) = call(&["check", "v6", "--func", "exponential", "--m-max", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("UNAVAILABLE"));
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = call(&["spectrum", "--no-such-flag"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("Usage"));
    let (code, _, _) = call(&["check", "9Z"]);
    assert_eq!(code, EXIT_ERROR);
    let (code, _, err) = call(&["spectrum", "--func", "nonsense"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.starts_with("error:"));
    let (code, _, _) = call(&["spectrum", "--func", "exponential", "--m", "3", "--format", "svg"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    for sub in ["coeffs", "spectrum", "sweep", "dist", "check", "figure"] {
        assert!(out.contains(sub), "{sub}");
    }
}

#[test]
fn zeta_star_sweep_is_byte_identical() {
    let a = call(&["sweep", "--func", "zeta-star", "--l", "1", "--m-max", "12", "--jobs", "4"]);
    let b = call(&["sweep", "--func", "zeta-star", "--l", "1", "--m-max", "12", "--jobs", "1"]);
    assert_eq!(a.0, EXIT_OK, "{}", a.2);
    assert_eq!(a.1, b.1);
    assert_eq!(a.1.lines().count(), 1 + (1..=12).sum::<usize>());
}

#[test]
fn figure_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("spec.svg");
    let (code, _, err) = call(&[
        "figure",
        "spectra",
        "--func",
        "exponential",
        "--m-max",
        "4",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle").count(), 10);
    let mf = Manifest::load(&dir.path().join("spec.svg.manifest.json")).unwrap();
    assert_eq!(mf.m_grid, vec![1, 2, 3, 4]);
    mf.verify(dir.path()).unwrap();
    fs::write(&svg, text.replacen("circle", "circlE", 1)).unwrap();
    assert!(mf.verify(dir.path()).is_err());
}

#[test]
fn dist_json_reports_mean() {
    let (code, out, _) = call(&["dist", "--func", "exponential", "--m", "3", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    assert_eq!(v["missing_mass"], "0");
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_muspec"))
        .args(["coeffs", "--func", "exponential", "--n", "6"])
        .env("MUSPEC_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    let stdout = String::from_utf8(status.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 8);
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 2);
}
