//! Subcommand implementations. Each returns the process exit code: 0 when
//! every check passes, 2 when the criterion is violated, 3 when the scan
//! finds an interior collision, 4 on numerical or input failure. All
//! iteration orders are fixed, so equal configs produce byte-identical
//! reports.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use schwarzlift_core::fd;
use schwarzlift_core::metric::{
    normalizing_mobius, omega_profile, radial_hessian_check, transferred_conformal_factor,
    ConvexityReport, RadialMetric,
};
use schwarzlift_core::mesh::lift_mesh;
use schwarzlift_core::nehari::{disconjugacy_check, lambda_limit, solve_extremal, NehariFunction};
use schwarzlift_core::space_mobius::SpaceMobius;
use schwarzlift_core::verify::{check_criterion, univalence_scan, CriterionGrid};

use crate::config::RunConfig;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CRITERION: i32 = 2;
pub const EXIT_COLLISION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] schwarzlift_core::error::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Config(String),
}

pub type CliResult<T> = Result<T, CliError>;

/// Write `text` to the file at `path`, or to stdout when no path is given.
/// Returns the path actually written, for the summary record.
fn emit(path: Option<&Path>, text: &str) -> CliResult<Option<String>> {
    match path {
        Some(p) => {
            fs::write(p, text)?;
            Ok(Some(p.display().to_string()))
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(None)
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}

#[derive(Serialize)]
struct ExtremalSummary {
    command: &'static str,
    weight: String,
    rmax: f64,
    n: usize,
    lambda: f64,
    mu: f64,
    disconjugate: bool,
    truncation: f64,
    csv: Option<String>,
}

/// Solve u″ + pu = 0, export the profile CSV, and report λ = lim (1−x²)²p
/// and the exponent μ = 1 + √(1−λ). CSV goes to --out (summary JSON then
/// to stdout) or to stdout (summary to stderr).
pub fn extremal(cfg: &RunConfig, out: Option<&Path>) -> CliResult<i32> {
    let p = cfg.weight.build()?;
    let dis = disconjugacy_check(&p)?;
    if !dis.pass {
        eprintln!(
            "schwarzlift: weight `{p}` is not disconjugate on (-1,1): u0 crosses zero at {:?} ({})",
            dis.crossings, dis.note
        );
        return Ok(EXIT_NUMERIC);
    }
    let profile = solve_extremal(&p, cfg.extremal.rmax, cfg.extremal.n)?;
    let (lambda, mu) = lambda_limit(&p)?;

    let mut csv = Vec::new();
    profile.to_csv(&mut csv)?;
    let csv = String::from_utf8(csv).expect("profile CSV is UTF-8");
    let written = emit(out, &csv)?;

    let summary = json_line(&ExtremalSummary {
        command: "extremal",
        weight: p.to_string(),
        rmax: cfg.extremal.rmax,
        n: cfg.extremal.n,
        lambda,
        mu,
        disconjugate: true,
        truncation: dis.truncation,
        csv: written.clone(),
    })?;
    if written.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    command: &'static str,
    family: &'a str,
    formula: &'a str,
    weight: String,
    report: &'a schwarzlift_core::verify::CriterionReport,
}

/// Evaluate the margin 2p(|z|) − |𝒮f| − e^{2σ}|K| on the polar grid.
/// Exit 0 when min margin ≥ −tol, else 2.
pub fn check(
    cfg: &RunConfig,
    out: Option<&Path>,
    margins_csv: Option<&Path>,
) -> CliResult<i32> {
    let built = cfg.map.build()?;
    let p = cfg.weight.build_for(built.weight.as_ref())?;
    let grid = CriterionGrid::new(cfg.grid.nr, cfg.grid.ntheta, cfg.grid.rmax)?
        .with_tol(cfg.tolerances.criterion);
    let report = check_criterion(&built.map, &p, &grid)?;

    if let Some(path) = margins_csv {
        let mut csv = String::from("r,theta,margin\n");
        for i in 0..report.nr {
            for j in 0..report.ntheta {
                let (r, theta) = report.node(i, j);
                let margin = report.margins[i * report.ntheta + j];
                csv.push_str(&format!("{r},{theta},{margin}\n"));
            }
        }
        fs::write(path, csv)?;
    }

    emit(
        out,
        &json_line(&CheckOutput {
            command: "check",
            family: &built.family,
            formula: &built.formula,
            weight: p.to_string(),
            report: &report,
        })?,
    )?;
    Ok(if report.pass { EXIT_PASS } else { EXIT_CRITERION })
}

#[derive(Serialize)]
struct ScanOutput<'a> {
    command: &'static str,
    family: &'a str,
    formula: &'a str,
    report: &'a schwarzlift_core::verify::CollisionReport,
}

/// Collision scan of the lifted point cloud. Exit 0 when no interior pair
/// collides, else 3 (boundary identifications are reported but expected).
pub fn scan(cfg: &RunConfig, out: Option<&Path>) -> CliResult<i32> {
    let built = cfg.map.build()?;
    let report = univalence_scan(&built.map, cfg.scan.n, cfg.scan.rmax, cfg.scan.sep)?;
    emit(
        out,
        &json_line(&ScanOutput {
            command: "scan",
            family: &built.family,
            formula: &built.formula,
            report: &report,
        })?,
    )?;
    Ok(if report.interior_collisions > 0 {
        EXIT_COLLISION
    } else {
        EXIT_PASS
    })
}

#[derive(Serialize)]
struct MeshSummary<'a> {
    command: &'static str,
    family: &'a str,
    format: &'a str,
    nr: usize,
    ntheta: usize,
    rmax: f64,
    vertices: usize,
    faces: usize,
    path: Option<String>,
}

/// Export the lifted surface as a triangle mesh. The format comes from
/// --format, else from the --out extension, else from the config.
pub fn mesh(cfg: &RunConfig, format: Option<&str>, out: Option<&Path>) -> CliResult<i32> {
    let built = cfg.map.build()?;
    let inferred = format
        .map(str::to_owned)
        .or_else(|| {
            out.and_then(Path::extension)
                .and_then(|e| e.to_str())
                .filter(|e| matches!(*e, "obj" | "ply"))
                .map(str::to_owned)
        })
        .unwrap_or_else(|| cfg.mesh.format.clone());
    let mesh = lift_mesh(&built.map, cfg.mesh.nr, cfg.mesh.ntheta, cfg.mesh.rmax)?;
    // PLY is binary, so the payload stays a byte buffer throughout.
    let mut payload = Vec::new();
    match inferred.as_str() {
        "obj" => mesh.write_obj(&mut payload)?,
        "ply" => mesh.write_ply(&mut payload)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown mesh format `{other}`; expected obj or ply"
            )))
        }
    }
    let written = match out {
        Some(p) => {
            fs::write(p, &payload)?;
            Some(p.display().to_string())
        }
        None => {
            io::stdout().write_all(&payload)?;
            None
        }
    };

    let summary = json_line(&MeshSummary {
        command: "mesh",
        family: &built.family,
        format: &inferred,
        nr: cfg.mesh.nr,
        ntheta: cfg.mesh.ntheta,
        rmax: cfg.mesh.rmax,
        vertices: mesh.vertices().len(),
        faces: mesh.faces().len(),
        path: written.clone(),
    })?;
    if written.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct RayReport {
    theta: f64,
    #[serde(flatten)]
    report: ConvexityReport,
}

#[derive(Serialize)]
struct ConvexityOutput<'a> {
    command: &'static str,
    family: &'a str,
    weight: String,
    metric_rmax: f64,
    rays: Vec<RayReport>,
    omega: Vec<RayReport>,
    /// τ(0) and τ′(0) of the normalized transferred factor; the
    /// construction makes these 0 and −1.
    tau_at_zero: Option<f64>,
    tau_slope: Option<f64>,
    normalized_omega: Option<ConvexityReport>,
    pass: bool,
}

/// Radial-Hessian and ω-convexity reports for the map against the extremal
/// metric of the weight. Exit 2 when any report fails.
pub fn convexity(cfg: &RunConfig, out: Option<&Path>) -> CliResult<i32> {
    let built = cfg.map.build()?;
    let m = &built.map;
    let p = cfg.weight.build_for(built.weight.as_ref())?;
    let metric = RadialMetric::new(solve_extremal(&p, cfg.grid.rmax, cfg.extremal.n)?)?;

    let mut rays = Vec::new();
    let mut omega = Vec::new();
    let mut pass = true;
    for k in 0..cfg.convexity.angles {
        let theta = std::f64::consts::TAU * k as f64 / cfg.convexity.angles as f64;
        let ray = radial_hessian_check(m, &metric, theta, cfg.convexity.samples)?;
        let profile = omega_profile(m, &SpaceMobius::identity(), &metric, theta)?;
        pass &= ray.pass && profile.report.pass;
        rays.push(RayReport { theta, report: ray });
        omega.push(RayReport {
            theta,
            report: profile.report,
        });
    }

    let (mut tau_at_zero, mut tau_slope, mut normalized_omega) = (None, None, None);
    if cfg.convexity.normalize {
        let t = normalizing_mobius(m, 0.0)?;
        let tau = |r: f64| -> schwarzlift_core::error::Result<f64> {
            Ok(transferred_conformal_factor(m, &t, Complex64::new(r, 0.0))?.ln())
        };
        let h = 1e-2;
        let samples = (-2..=2)
            .map(|k| tau(k as f64 * h))
            .collect::<schwarzlift_core::error::Result<Vec<f64>>>()?;
        tau_at_zero = Some(samples[2]);
        tau_slope = Some(fd::d1(&samples, 2, h)?);
        let profile = omega_profile(m, &t, &metric, 0.0)?;
        pass &= profile.report.pass;
        normalized_omega = Some(profile.report);
    }

    let code = if pass { EXIT_PASS } else { EXIT_CRITERION };
    emit(
        out,
        &json_line(&ConvexityOutput {
            command: "convexity",
            family: &built.family,
            weight: p.to_string(),
            metric_rmax: cfg.grid.rmax,
            rays,
            omega,
            tau_at_zero,
            tau_slope,
            normalized_omega,
            pass,
        })?,
    )?;
    Ok(code)
}

/// List the example families (with default parameters substituted) and the
/// weight catalogue.
pub fn examples() -> CliResult<i32> {
    use schwarzlift_core::catalogue::ExampleFamily;

    let defaults = crate::config::MapSpec::default();
    let families = [
        ExampleFamily::CatenoidExp {
            c: defaults.c,
            t: defaults.t,
        },
        ExampleFamily::StripCatenoid {
            weight: NehariFunction::from_name(&defaults.weight)?,
            c: 0.05,
        },
        ExampleFamily::Hille {
            eps: defaults.eps,
            c: 0.02,
        },
    ];
    println!("map families (defaults shown; override with --c, --t, --eps, --map-weight):");
    for family in &families {
        println!("  {:<16} {}", family.name(), family.formula());
    }
    println!();
    println!("weights for --p (or pass any even positive expression in x):");
    for (key, formula, lambda) in [
        ("pi2over4", "p(x) = π²/4", 0.0),
        ("nehari2", "p(x) = 1/(1−x²)²", 1.0),
        ("two_over", "p(x) = 2/(1−x²)", 0.0),
        ("one_over", "p(x) = 1/(1−x²)", 0.0),
    ] {
        println!("  {key:<16} {formula:<24} λ = {lambda}");
    }
    Ok(EXIT_PASS)
}
