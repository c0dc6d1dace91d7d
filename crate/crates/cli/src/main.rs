#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Perimeter, torsion and scale-free functionals of convex shapes.
#[derive(Parser)]
#[command(name = "torsionlab", version)]
struct Cli {
    /// Worker threads for sweeps and verification (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate P, T, |Ω| and F_q of a shape file.
    Eval(EvalArgs),
    /// Run a parametric family sweep and write its CSV.
    Sweep(SweepArgs),
    /// Check the classical inequalities on random convex polygons.
    Verify(VerifyArgs),
    /// Thin-domain limit of a thickness profile.
    Thin(ThinArgs),
    /// Maximize F_{1/2} over triangles or convex polygons.
    Search(SearchArgs),
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Shape JSON file.
    shape: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Finest grid spacing, e.g. 0.004 or 1/256.
    #[arg(long, default_value = "1/256", value_parser = parse_real)]
    grid: f64,
    /// Coarser Richardson levels below the finest grid (0..=2).
    #[arg(long, default_value_t = 1)]
    refine: u32,
    /// Write the measures as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Slab,
    Wiggle,
    Perforation,
    Cone,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Comma-separated family parameters (ε, wiggle counts, or c).
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_real)]
    params: Vec<f64>,
    /// Wiggle amplitude.
    #[arg(long, default_value_t = 0.3)]
    amplitude: f64,
    /// Finest grid spacing for wiggle rows.
    #[arg(long, default_value = "1/256", value_parser = parse_real)]
    grid: f64,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Number of random polygons.
    #[arg(long = "n", default_value_t = 100)]
    n_shapes: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "1/256", value_parser = parse_real)]
    grid: f64,
    /// Extra relative slack on top of the solver error estimate.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ThinArgs {
    /// Profile JSON file.
    profile: PathBuf,
    /// Ambient dimension; must match the profile base when given.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Triangles,
    Polygon,
}

#[derive(clap::Args)]
struct SearchArgs {
    #[arg(value_enum)]
    mode: Mode,
    /// Height/base ratios for triangle mode.
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.2,0.1,0.05", value_parser = parse_real)]
    params: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    n_vertices: usize,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 0.7)]
    shrink: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "1/256", value_parser = parse_real)]
    grid: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Accepts plain reals and fractions like `1/256`.
fn parse_real(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("thread pool is configured once");
    }
    let outcome = match cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Verify(a) => commands::verify(a),
        Command::Thin(a) => commands::thin(a),
        Command::Search(a) => commands::search(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
