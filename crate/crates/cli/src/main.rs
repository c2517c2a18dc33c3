//! Command-line driver for convergence studies and mesh export.
//!
//! Exit codes: 0 on full success, 1 on configuration errors, 2 when at
//! least one sweep case failed.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use layerfem::linsolve::{SolverConfig, SolverMethod};
use layerfem::mesh::{build_mesh, MeshParams, TensorMesh};
use layerfem::study::{emit, run_study, OutputFormat, StudyConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "layerfem",
    version,
    about = "Q_k finite elements on Bakhvalov-type meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study over a (k, eps2, eps1, N) grid.
    Study(StudyArgs),
    /// Build one mesh and export its axes.
    Mesh(MeshArgs),
}

#[derive(Args, Debug)]
struct StudyArgs {
    /// Flat key=value file supplying any long flag; command line wins.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Built-in problem name.
    #[arg(long, default_value = "two-param")]
    problem: String,

    /// Polynomial degrees, comma separated.
    #[arg(long = "k", value_delimiter = ',', default_value = "1")]
    k: Vec<usize>,

    /// Elements per direction, comma separated, each >= 8 and divisible by 4.
    #[arg(long = "N", value_delimiter = ',', default_value = "8,16,32,64")]
    n: Vec<usize>,

    /// Diffusion parameters, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1e-6")]
    eps1: Vec<f64>,

    /// Convection parameters, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1e-4")]
    eps2: Vec<f64>,

    /// Grading exponent; defaults to k + 1 per degree.
    #[arg(long)]
    tau: Option<f64>,

    /// Layer-strength parameter.
    #[arg(long, default_value_t = 0.5)]
    p: f64,

    /// Parabolic-layer parameter.
    #[arg(long, default_value_t = 0.25)]
    delta: f64,

    /// Assembly quadrature points per direction (default k + 2).
    #[arg(long)]
    quad: Option<usize>,

    /// Error quadrature points per direction (default k + 3).
    #[arg(long)]
    quad_error: Option<usize>,

    /// Solver: auto, lu or gmres.
    #[arg(long, default_value = "auto")]
    solver: String,

    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,

    /// Output formats, comma separated: csv, markdown, json.
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    format: Vec<String>,

    /// Output base path (extension added per format).
    #[arg(long, default_value = "study")]
    out: PathBuf,

    /// Worker threads for the case pool.
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Record wall-clock times in the CSV (breaks byte-identical reruns).
    #[arg(long, default_value_t = false)]
    timing: bool,
}

#[derive(Args, Debug)]
struct MeshArgs {
    /// Elements per direction.
    #[arg(long = "N")]
    n: usize,

    #[arg(long)]
    eps1: f64,

    #[arg(long, default_value_t = 1e-4)]
    eps2: f64,

    /// Problem supplying the constants behind mu0/mu1.
    #[arg(long, default_value = "two-param")]
    problem: String,

    /// Override the computed layer rate at x = 0.
    #[arg(long)]
    mu0: Option<f64>,

    /// Override the computed layer rate at x = 1.
    #[arg(long)]
    mu1: Option<f64>,

    #[arg(long, default_value_t = 2.0)]
    tau: f64,

    #[arg(long, default_value_t = 0.5)]
    p: f64,

    #[arg(long, default_value_t = 0.25)]
    delta: f64,

    /// Output base path; writes <base>-x.txt, <base>-y.txt, <base>.json.
    #[arg(long, default_value = "mesh")]
    out: PathBuf,
}

fn main() -> ExitCode {
    // A config file only supplies defaults: its key=value pairs are parsed
    // as flags placed before the real command line, so explicit flags win.
    let argv: Vec<String> = std::env::args().collect();
    let argv = match splice_config_args(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version printing itself.
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };

    let run = match cli.command {
        Command::Study(args) => run_study_command(args),
        Command::Mesh(args) => run_mesh_command(args),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Reads `--config FILE` (if present) and splices `--key value` pairs from
/// the file right after the subcommand, before the user's flags.
fn splice_config_args(argv: Vec<String>) -> anyhow::Result<Vec<String>> {
    let Some(pos) = argv.iter().position(|a| a == "--config") else {
        return Ok(argv);
    };
    let path = argv
        .get(pos + 1)
        .filter(|p| !p.starts_with("--"))
        .context("--config needs a file path")?;
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read config file {path}"))?;
    // Flags given explicitly on the command line shadow the config file.
    let explicit: std::collections::HashSet<&str> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut injected = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {} is not key=value: `{line}`", lineno + 1);
        };
        let key = key.trim();
        if explicit.contains(key) {
            continue;
        }
        injected.push(format!("--{key}"));
        injected.push(value.trim().to_string());
    }
    // argv = [prog, subcommand, flags...]; inject after the subcommand.
    if argv.len() < 2 {
        bail!("--config requires a subcommand");
    }
    let mut spliced = argv[..2].to_vec();
    spliced.extend(injected);
    spliced.extend(argv[2..].iter().cloned());
    Ok(spliced)
}

fn solver_config(name: &str, tol: f64) -> anyhow::Result<SolverConfig> {
    let method: SolverMethod = name.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(SolverConfig {
        method,
        tol,
        ..SolverConfig::default()
    })
}

fn run_study_command(args: StudyArgs) -> anyhow::Result<ExitCode> {
    let mut formats = Vec::new();
    for f in &args.format {
        formats.push(
            f.parse::<OutputFormat>()
                .map_err(|e| anyhow::anyhow!("{e}"))?,
        );
    }

    let config = StudyConfig {
        problem: args.problem,
        ks: args.k,
        ns: args.n,
        eps1: args.eps1,
        eps2: args.eps2,
        tau: args.tau,
        p: args.p,
        delta: args.delta,
        quad_assembly: args.quad,
        quad_error: args.quad_error,
        solver: solver_config(&args.solver, args.tol)?,
        jobs: args.jobs,
        timing: args.timing,
    };
    config.validate().map_err(|e| anyhow::anyhow!("{e}"))?;

    let result = run_study(&config).map_err(|e| anyhow::anyhow!("{e}"))?;
    for format in formats {
        let path = emit(&result, format, &args.out).map_err(|e| anyhow::anyhow!("{e}"))?;
        eprintln!("wrote {}", path.display());
    }

    let failed = result
        .cases
        .iter()
        .filter(|c| matches!(c.result, layerfem::study::CaseResult::Failed { .. }))
        .count();
    if failed > 0 {
        eprintln!("{failed} of {} cases failed", result.cases.len());
        Ok(ExitCode::from(2))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn run_mesh_command(args: MeshArgs) -> anyhow::Result<ExitCode> {
    let problem = layerfem::problem::builtin(&args.problem, args.eps1, args.eps2)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mu0 = args.mu0.unwrap_or(problem.mu0);
    let mu1 = args.mu1.unwrap_or(problem.mu1);

    let params = MeshParams::new(args.n, args.tau, args.p, args.delta, mu0, mu1, args.eps1)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mesh = build_mesh(&params).map_err(|e| anyhow::anyhow!("{e}"))?;
    for w in &mesh.warnings {
        eprintln!("warning: {w}");
    }

    let base = &args.out;
    let x_path = with_suffix(base, "-x.txt");
    let y_path = with_suffix(base, "-y.txt");
    let json_path = base.with_extension("json");
    TensorMesh::write_axis_text(&x_path, &mesh.x).map_err(|e| anyhow::anyhow!("{e}"))?;
    TensorMesh::write_axis_text(&y_path, &mesh.y).map_err(|e| anyhow::anyhow!("{e}"))?;
    mesh.write_json(&json_path)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    eprintln!(
        "wrote {}, {}, {}",
        x_path.display(),
        y_path.display(),
        json_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}
