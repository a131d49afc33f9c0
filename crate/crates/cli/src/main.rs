//! Command-line front end: univalence checks for Weierstrass–Enneper
//! lifts of planar harmonic maps. Subcommands evaluate the criterion
//! margin 2p(|z|) − |𝒮f| − e^{2σ}|K| on grids, scan lifts for
//! self-intersections, solve extremal weight ODEs, export surface meshes,
//! and run convexity diagnostics.
//!
//! A run is described by a `RunConfig` (TOML via --config) whose values
//! individual flags override; defaults live in one place, the config's
//! `Default` impls. Runs are deterministic: equal configs produce
//! byte-identical reports.

mod commands;
mod config;

use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, CliResult, EXIT_NUMERIC};
use config::RunConfig;

const EXIT_CODE_HELP: &str = "Exit codes:
  0  all checks passed
  2  criterion violated (negative margin or failed convexity report)
  3  interior collision found by the scan
  4  numerical or input failure (parse error, singularity, non-convergence)";

#[derive(Parser)]
#[command(
    name = "schwarzlift",
    version,
    about = "Schwarzian univalence criterion for lifts of planar harmonic maps",
    after_help = EXIT_CODE_HELP,
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    /// TOML run configuration; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Cap the rayon worker count (overrides SCHWARZLIFT_THREADS; default:
    /// all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Print the effective run configuration as TOML and exit instead of
    /// running the command. The output reparses to the same bytes.
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the extremal ODE u″ + pu = 0 and export the profile as CSV.
    Extremal(ExtremalArgs),
    /// Evaluate the criterion margin on a polar grid (exit 2 on violation).
    Check(CheckArgs),
    /// Scan the lifted surface for self-intersections (exit 3 on interior
    /// collision).
    Scan(ScanArgs),
    /// Export the lifted surface as an OBJ or PLY triangle mesh.
    Mesh(MeshArgs),
    /// Convexity diagnostics of the comparison density against an extremal
    /// metric (exit 2 on a failed report).
    Convexity(ConvexityArgs),
    /// List the map families and the weight catalogue with their formulas.
    Examples,
}

/// Map selection, shared by check/scan/mesh/convexity.
#[derive(Args, Clone)]
struct MapArgs {
    /// Map family: catenoid_exp, strip_catenoid, hille or custom
    /// [default: catenoid_exp].
    #[arg(long, value_name = "NAME")]
    family: Option<String>,

    /// Coefficient c of the exponential / composed families [default: 60].
    #[arg(long, value_name = "C")]
    c: Option<f64>,

    /// Scale t of the exponential family [default: 1].
    #[arg(long, value_name = "T")]
    t: Option<f64>,

    /// Spiral exponent ε of the hille family [default: 0.05].
    #[arg(long, value_name = "EPS")]
    eps: Option<f64>,

    /// Weight key of the strip composition's extremal [default: nehari2].
    #[arg(long, value_name = "KEY")]
    map_weight: Option<String>,

    /// h(z) expression (implies --family custom).
    #[arg(long, value_name = "EXPR")]
    h: Option<String>,

    /// g(z) expression (implies --family custom).
    #[arg(long, value_name = "EXPR")]
    g: Option<String>,

    /// Second dilatation q(z), with q² = g′/h′ (implies --family custom).
    #[arg(long, value_name = "EXPR")]
    q: Option<String>,

    /// Base point of the custom family's height integral [default: 0,0].
    #[arg(long, value_name = "RE,IM")]
    z0: Option<String>,
}

impl MapArgs {
    fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        let spec = &mut cfg.map;
        if let Some(v) = &self.family {
            spec.family = v.clone();
        } else if self.h.is_some() || self.g.is_some() || self.q.is_some() {
            spec.family = "custom".into();
        }
        if let Some(v) = self.c {
            spec.c = v;
        }
        if let Some(v) = self.t {
            spec.t = v;
        }
        if let Some(v) = self.eps {
            spec.eps = v;
        }
        if let Some(v) = &self.map_weight {
            spec.weight = v.clone();
        }
        if let Some(v) = &self.h {
            spec.h = Some(v.clone());
        }
        if let Some(v) = &self.g {
            spec.g = Some(v.clone());
        }
        if let Some(v) = &self.q {
            spec.q = Some(v.clone());
        }
        if let Some(v) = &self.z0 {
            let (re, im) = v.split_once(',').ok_or_else(|| {
                CliError::Config(format!("--z0 expects \"re,im\", got `{v}`"))
            })?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Config(format!("--z0 component `{s}`: {e}")))
            };
            spec.z0 = [parse(re)?, parse(im)?];
        }
        Ok(())
    }
}

#[derive(Args)]
struct ExtremalArgs {
    /// Weight p: catalogue key (pi2over4, nehari2, two_over, one_over) or
    /// an even positive expression in x [default: pi2over4].
    #[arg(long, value_name = "WEIGHT")]
    p: Option<String>,

    /// Largest radius of the solve, in (0,1) [default: 0.9999].
    #[arg(long, value_name = "R")]
    rmax: Option<f64>,

    /// Grid points of the stored profile [default: 2000].
    #[arg(long, value_name = "N")]
    n: Option<usize>,

    /// Write the CSV here; the summary JSON then goes to stdout
    /// [default: CSV to stdout, summary to stderr].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    map: MapArgs,

    /// Weight p of the criterion: catalogue key or expression in x
    /// [default: the family's natural weight, else pi2over4].
    #[arg(long, value_name = "WEIGHT")]
    p: Option<String>,

    /// Radial grid count [default: 60].
    #[arg(long, value_name = "N")]
    nr: Option<usize>,

    /// Angular grid count [default: 60].
    #[arg(long, value_name = "N")]
    ntheta: Option<usize>,

    /// Outermost radius of the grid, in (0,1) [default: 0.95].
    #[arg(long, value_name = "R")]
    rmax: Option<f64>,

    /// Criterion tolerance: margins below −TOL fail. Dimensionless, same
    /// units as the margin 2p − |𝒮f| − e^{2σ}|K| [default: 1e-9].
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Also write the full margin grid as CSV (columns r,theta,margin).
    #[arg(long, value_name = "PATH")]
    margins_csv: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    map: MapArgs,

    /// Sunflower sample count (a rim ring at rmax is added) [default: 4000].
    #[arg(long, value_name = "N")]
    n: Option<usize>,

    /// Outermost radius of the cloud, in (0,1) [default: 0.95].
    #[arg(long, value_name = "R")]
    rmax: Option<f64>,

    /// Minimal plane separation of a reported pair, in disk units
    /// [default: 0.05].
    #[arg(long, value_name = "SEP")]
    sep: Option<f64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    #[command(flatten)]
    map: MapArgs,

    /// Radial ring count [default: 48].
    #[arg(long, value_name = "N")]
    nr: Option<usize>,

    /// Vertices per ring [default: 96].
    #[arg(long, value_name = "N")]
    ntheta: Option<usize>,

    /// Mesh radius, in (0,1) [default: 0.95].
    #[arg(long, value_name = "R")]
    rmax: Option<f64>,

    /// obj or ply; defaults to the --out extension, else obj.
    #[arg(long, value_name = "FMT")]
    format: Option<String>,

    /// Write the mesh here; the summary JSON then goes to stdout
    /// [default: mesh to stdout, summary to stderr].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvexityArgs {
    #[command(flatten)]
    map: MapArgs,

    /// Weight of the extremal comparison metric [default: the family's
    /// natural weight, else pi2over4].
    #[arg(long, value_name = "WEIGHT")]
    p: Option<String>,

    /// Equispaced ray count [default: 8].
    #[arg(long, value_name = "N")]
    angles: Option<usize>,

    /// Arclength samples per ray; reports pass at second-difference margin
    /// ≥ −1e-6 (dimensionless, fixed), so keep N modest (~100) for maps
    /// whose margin is identically zero [default: 400].
    #[arg(long, value_name = "N")]
    samples: Option<usize>,

    /// Also check the ω profile after the normalizing transformation
    /// (τ(0) = 0, τ′(0) = −1) [default: true].
    #[arg(long, value_name = "BOOL")]
    normalize: Option<bool>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    init_threads(cli.threads);
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("schwarzlift: error: {e}");
            EXIT_NUMERIC
        }
    };
    process::exit(code);
}

/// Build the global rayon pool before any parallel work: the flag wins,
/// then SCHWARZLIFT_THREADS, else rayon's default (all cores).
fn init_threads(flag: Option<usize>) {
    let env = std::env::var("SCHWARZLIFT_THREADS").ok().and_then(|v| {
        let parsed = v.parse::<usize>().ok().filter(|&n| n > 0);
        if parsed.is_none() {
            eprintln!("schwarzlift: ignoring SCHWARZLIFT_THREADS=`{v}` (want a positive integer)");
        }
        parsed
    });
    if let Some(n) = flag.or(env) {
        // Errors only if a pool already exists, which main never sets up twice.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load_config(path: Option<&PathBuf>) -> CliResult<RunConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            Ok(RunConfig::from_toml(&text)?)
        }
        None => Ok(RunConfig::default()),
    }
}

fn dump_config(cfg: &RunConfig) -> CliResult<i32> {
    print!("{}", cfg.to_toml());
    Ok(commands::EXIT_PASS)
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    let mut cfg = load_config(cli.config.as_ref())?;
    let dump = cli.dump_config;
    match cli.command {
        Command::Extremal(args) => {
            if let Some(v) = &args.p {
                cfg.weight.p = Some(v.clone());
            }
            if let Some(v) = args.rmax {
                cfg.extremal.rmax = v;
            }
            if let Some(v) = args.n {
                cfg.extremal.n = v;
            }
            if dump {
                return dump_config(&cfg);
            }
            commands::extremal(&cfg, args.out.as_deref())
        }
        Command::Check(args) => {
            args.map.apply(&mut cfg)?;
            if let Some(v) = &args.p {
                cfg.weight.p = Some(v.clone());
            }
            if let Some(v) = args.nr {
                cfg.grid.nr = v;
            }
            if let Some(v) = args.ntheta {
                cfg.grid.ntheta = v;
            }
            if let Some(v) = args.rmax {
                cfg.grid.rmax = v;
            }
            if let Some(v) = args.tol {
                cfg.tolerances.criterion = v;
            }
            if dump {
                return dump_config(&cfg);
            }
            commands::check(&cfg, args.out.as_deref(), args.margins_csv.as_deref())
        }
        Command::Scan(args) => {
            args.map.apply(&mut cfg)?;
            if let Some(v) = args.n {
                cfg.scan.n = v;
            }
            if let Some(v) = args.rmax {
                cfg.scan.rmax = v;
            }
            if let Some(v) = args.sep {
                cfg.scan.sep = v;
            }
            if dump {
                return dump_config(&cfg);
            }
            commands::scan(&cfg, args.out.as_deref())
        }
        Command::Mesh(args) => {
            args.map.apply(&mut cfg)?;
            if let Some(v) = args.nr {
                cfg.mesh.nr = v;
            }
            if let Some(v) = args.ntheta {
                cfg.mesh.ntheta = v;
            }
            if let Some(v) = args.rmax {
                cfg.mesh.rmax = v;
            }
            if let Some(v) = &args.format {
                cfg.mesh.format = v.clone();
            }
            if dump {
                return dump_config(&cfg);
            }
            commands::mesh(&cfg, args.format.as_deref(), args.out.as_deref())
        }
        Command::Convexity(args) => {
            args.map.apply(&mut cfg)?;
            if let Some(v) = &args.p {
                cfg.weight.p = Some(v.clone());
            }
            if let Some(v) = args.angles {
                cfg.convexity.angles = v;
            }
            if let Some(v) = args.samples {
                cfg.convexity.samples = v;
            }
            if let Some(v) = args.normalize {
                cfg.convexity.normalize = v;
            }
            if dump {
                return dump_config(&cfg);
            }
            commands::convexity(&cfg, args.out.as_deref())
        }
        Command::Examples => {
            if dump {
                return dump_config(&cfg);
            }
            commands::examples()
        }
    }
}
