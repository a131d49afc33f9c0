//! End-to-end tests of the binary: exit codes, report contents, config
//! round-trips, and determinism across thread counts.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_schwarzlift"));
    cmd.env_remove("SCHWARZLIFT_THREADS");
    cmd
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = bin().args(args).output().expect("binary runs");
    (
        status.code().expect("exit code"),
        String::from_utf8(stdout).expect("stdout is UTF-8"),
        String::from_utf8(stderr).expect("stderr is UTF-8"),
    )
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("schwarzlift-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("valid JSON")
}

#[test]
fn examples_lists_families_and_weights() {
    let (code, out, _) = run(&["examples"]);
    assert_eq!(code, 0);
    for needle in [
        "catenoid_exp",
        "strip_catenoid",
        "hille",
        "pi2over4",
        "nehari2",
        "two_over",
        "one_over",
        "π²/4",
    ] {
        assert!(out.contains(needle), "missing `{needle}` in:\n{out}");
    }
}

#[test]
fn extremal_profile_matches_the_closed_form() {
    let dir = scratch("extremal");
    let csv_path = dir.join("nehari2.csv");
    let (code, out, _) = run(&[
        "extremal",
        "--p",
        "nehari2",
        "--rmax",
        "0.99",
        "--n",
        "512",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let summary = json(&out);
    assert_eq!(summary["command"], "extremal");
    assert_eq!(summary["lambda"], 1.0);
    assert_eq!(summary["mu"], 1.0);
    assert_eq!(summary["disconjugate"], true);

    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let x_col = header.iter().position(|&c| c == "x").unwrap();
    let phi_col = header.iter().position(|&c| c == "phi").unwrap();
    let mut worst = 0.0f64;
    let mut rows = 0;
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        worst = worst.max((fields[phi_col] - fields[x_col].atanh()).abs());
        rows += 1;
    }
    assert_eq!(rows, 513);
    assert!(worst <= 1e-8, "max |phi - atanh(x)| = {worst:.3e}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn extremal_reports_lambda_for_expressions() {
    let (code, out, err) = run(&["extremal", "--p", "1/(1-x^2)", "--rmax", "0.9", "--n", "128"]);
    assert_eq!(code, 0);
    // CSV on stdout, summary JSON on stderr.
    assert!(out.starts_with("x,"), "expected CSV header, got:\n{out}");
    let summary = json(&err);
    assert_eq!(summary["weight"], "1/(1-x^2)");
    assert!(summary["lambda"].as_f64().unwrap().abs() <= 1e-9);
    assert!((summary["mu"].as_f64().unwrap() - 2.0).abs() <= 1e-9);
}

#[test]
fn check_exit_codes_span_the_contract() {
    // The identity family passes with margin ~0 over the whole grid.
    let (code, out, _) = run(&["check", "--c", "60", "--t", "1"]);
    assert_eq!(code, 0);
    let report = &json(&out)["report"];
    assert_eq!(report["pass"], true);
    assert!(report["min_margin"].as_f64().unwrap().abs() <= 1e-9);
    assert_eq!(report["equality_locus"].as_array().unwrap().len(), 3600);

    // Stretching the scale violates the criterion by the constant
    // (1 − t²)π²/2 wherever the margin has flattened.
    let (code, out, _) = run(&["check", "--t", "1.2", "--rmax", "0.8"]);
    assert_eq!(code, 2);
    let min = json(&out)["report"]["min_margin"].as_f64().unwrap();
    assert!(
        (min - (1.0 - 1.44) * std::f64::consts::PI.powi(2) / 2.0).abs() <= 1e-6,
        "min margin {min}"
    );

    // Malformed expressions exit 4 with a positional diagnostic.
    let (code, _, err) = run(&["check", "--h", "exp(", "--g", "0", "--q", "0"]);
    assert_eq!(code, 4);
    assert!(err.contains("parse error at byte"), "stderr:\n{err}");
}

#[test]
fn scan_flags_interior_collisions() {
    // t = 1.5 identifies interior points (x, y) ~ (x, y − 4/3).
    let (code, out, _) = run(&["scan", "--t", "1.5", "--n", "4000"]);
    assert_eq!(code, 3);
    let report = &json(&out)["report"];
    assert_eq!(report["pass"], false);
    assert!(report["interior_collisions"].as_u64().unwrap() > 0);

    // t = 1 only touches itself at the boundary cut ±i·rmax.
    let (code, out, _) = run(&["scan", "--t", "1", "--n", "4000", "--rmax", "0.999"]);
    assert_eq!(code, 0);
    let report = &json(&out)["report"];
    assert_eq!(report["pass"], true);
    assert!(report["boundary_collisions"].as_u64().unwrap() > 0);
    let nearest = &report["nearest"];
    let y1 = nearest["z1"][1].as_f64().unwrap();
    let y2 = nearest["z2"][1].as_f64().unwrap();
    assert!(y1 * y2 < 0.0, "cut pair straddles the real axis");
    assert!((y1.abs() - 0.999).abs() <= 1e-6);
}

#[test]
fn mesh_formats_and_counts() {
    let dir = scratch("mesh");
    let ply_path = dir.join("surface.ply");
    let (code, out, _) = run(&[
        "mesh",
        "--nr",
        "6",
        "--ntheta",
        "12",
        "--out",
        ply_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let summary = json(&out);
    assert_eq!(summary["format"], "ply");
    assert_eq!(summary["vertices"], 73);
    assert_eq!(summary["faces"], 132);
    assert!(fs::read(&ply_path).unwrap().starts_with(b"ply"));

    let (code, out, err) = run(&["mesh", "--nr", "6", "--ntheta", "12"]);
    assert_eq!(code, 0);
    let vs = out.lines().filter(|l| l.starts_with("v ")).count();
    let vns = out.lines().filter(|l| l.starts_with("vn ")).count();
    let fs_ = out.lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!((vs, vns, fs_), (73, 73, 132));
    assert_eq!(json(&err)["format"], "obj");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn convexity_passes_for_the_catenoid() {
    let (code, out, _) = run(&["convexity", "--angles", "2"]);
    assert_eq!(code, 0);
    let report = json(&out);
    assert_eq!(report["pass"], true);
    assert!((report["tau_slope"].as_f64().unwrap() + 1.0).abs() <= 1e-6);
    assert_eq!(report["rays"].as_array().unwrap().len(), 2);
    assert_eq!(report["normalized_omega"]["pass"], true);
}

#[test]
fn config_round_trips_and_flags_override() {
    let dir = scratch("config");

    // The dumped effective config reparses to the same bytes.
    let (code, dumped, _) = run(&["check", "--dump-config", "--t", "1.2", "--rmax", "0.8"]);
    assert_eq!(code, 0);
    let path = dir.join("run.toml");
    fs::write(&path, &dumped).unwrap();
    let (code, redumped, _) = run(&["check", "--config", path.to_str().unwrap(), "--dump-config"]);
    assert_eq!(code, 0);
    assert_eq!(dumped, redumped, "config round-trip must be byte-identical");

    // The file alone reproduces the violation; a flag overrides it.
    let (code, _, _) = run(&["check", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["check", "--config", path.to_str().unwrap(), "--t", "1"]);
    assert_eq!(code, 0);

    // Unreadable and malformed configs fail with exit 4.
    let (code, _, err) = run(&["check", "--config", dir.join("absent.toml").to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("absent.toml"));
    fs::write(dir.join("bad.toml"), "[grid]\nnrr = 3\n").unwrap();
    let (code, _, err) = run(&["check", "--config", dir.join("bad.toml").to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("nrr"), "stderr:\n{err}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let single = bin()
        .args(["check", "--t", "1.1"])
        .env("SCHWARZLIFT_THREADS", "1")
        .output()
        .unwrap();
    let quad = bin()
        .args(["check", "--t", "1.1", "--threads", "4"])
        .output()
        .unwrap();
    assert_eq!(single.status.code(), Some(2));
    assert_eq!(quad.status.code(), Some(2));
    assert_eq!(single.stdout, quad.stdout, "reports must be byte-identical");

    let scan_a = bin().args(["scan", "--n", "2000"]).output().unwrap();
    let scan_b = bin()
        .args(["scan", "--n", "2000"])
        .env("SCHWARZLIFT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(scan_a.stdout, scan_b.stdout);
}
