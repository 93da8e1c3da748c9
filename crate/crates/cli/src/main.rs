//! `sphereiso`: generates instances and runs the verification suites,
//! printing a JSON report. The exit code is 0 exactly when every check in
//! the report passed.

mod gen;
mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "sphereiso", version, about = "Isometries of positive unit spheres: instance generation and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random space, its swap-family operators and a planted operator.
    Gen(GenArgs),
    /// Run a verification suite or check a bundle.
    #[command(subcommand)]
    Run(RunCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Arbitrary-precision rationals.
    Exact,
    /// Double precision.
    Float,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GenArgs {
    #[arg(long, default_value_t = 8)]
    pub atoms: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Also write a perturbed oracle, e.g. `perturb:0.01`.
    #[arg(long, value_parser = parse_adversarial)]
    pub adversarial: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn parse_adversarial(s: &str) -> Result<f64, String> {
    let eps = s.strip_prefix("perturb:").ok_or_else(|| format!("expected `perturb:EPS`, got `{s}`"))?;
    match eps.parse::<f64>() {
        Ok(e) if e.is_finite() && e > 0.0 => Ok(e),
        _ => Err(format!("perturbation `{eps}` is not a positive number")),
    }
}

/// Flags shared by every suite.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restrict the suite to one exponent.
    #[arg(long)]
    pub p: Option<f64>,
    /// Largest number of atoms (or points).
    #[arg(long)]
    pub atoms: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum RunCommand {
    /// Extract `(Λ, h)` from a bundled oracle, or run the planted round trip.
    Extract {
        bundle: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a bundled operator, or run the isomorphism and isometry suites.
    Verify {
        bundle: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Density existence and uniqueness against the feasibility oracle.
    Rn {
        /// Enumerate every partition of up to this many atoms.
        #[arg(long, default_value_t = 4)]
        exhaustive: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Restricted-sphere distances against direct search.
    Dist {
        #[command(flatten)]
        common: Common,
    },
    /// Sharp-family calculus on the five-level grid.
    Sharp {
        #[command(flatten)]
        common: Common,
    },
    /// Permutation oracles on `C(X)` spheres and distances to peak classes.
    Homeo {
        #[command(flatten)]
        common: Common,
    },
}

fn configure_workers() -> Result<(), String> {
    let Ok(raw) = std::env::var("SPHEREISO_WORKERS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("SPHEREISO_WORKERS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("SPHEREISO_WORKERS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Gen(args) => gen::gen(&args),
        Command::Run(cmd) => run::run(&cmd),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
