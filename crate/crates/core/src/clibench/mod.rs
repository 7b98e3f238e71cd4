//! The `psdroot` command line: `gen`, `solve`, `bench` and `report`.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a solver
//! did not converge.

pub mod bench;
pub mod report;
pub mod suite;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::gallery::{self, condition_report, MatrixSpec};
use crate::matcore::{io as mm, sqrt_eig, SymMatrix};
use crate::solvers::{Method, ScaleMode, SolverConfig};
use suite::{Overrides, ScaleArg};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    /// `stage` names the step that failed (e.g. "parse matrix spec").
    #[error("{stage}: {msg}")]
    Input { stage: &'static str, msg: String },
    #[error("schema error in column `{column}`: {msg}")]
    Schema { column: String, msg: String },
}

impl CliError {
    pub fn input(stage: &'static str, e: impl std::fmt::Display) -> Self {
        Self::Input {
            stage,
            msg: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "psdroot", version, about = "Square roots of symmetric positive (semi)definite matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a gallery matrix in Matrix Market array format.
    Gen {
        /// hilb:<n>, invhilb:<n>, randcorr:<n>:<seed>, spiked:<n>:<r>:<beta>:<seed> or lowrank:<n>:<r>:<seed>
        #[arg(long)]
        matrix: String,
        /// Matrix Market output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the square root of one matrix with one method.
    Solve(SolveArgs),
    /// Run a benchmark suite and write one results row per (matrix, method).
    Bench(BenchArgs),
    /// Rank methods per matrix from a results CSV.
    Report {
        /// Results CSV written by `bench`.
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["matrix", "input"]))]
pub struct SolveArgs {
    /// yamsr, gd, lsgd, pn, binomial or eig
    #[arg(long)]
    pub method: Method,
    /// Gallery spec, as for `gen`.
    #[arg(long)]
    pub matrix: Option<String>,
    /// Matrix Market file to read instead of a gallery spec.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Target relative residual ‖X² − A‖_F/‖A‖_F [default: 1e-12]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap [default: 1000]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// auto, none, or an explicit positive factor
    #[arg(long)]
    pub scale: Option<ScaleMode>,
    /// Fixed step for gd.
    #[arg(long)]
    pub step: Option<f64>,
    /// Per-iteration CSV: k,seconds,rel_residual,delta_T,objective
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the computed root in Matrix Market format.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Built-in suite (paper, paper-desk) or a TOML suite file.
    #[arg(long)]
    pub suite: String,
    /// Results file (CSV unless --json).
    #[arg(long)]
    pub out: PathBuf,
    /// Write a JSON array instead of CSV.
    #[arg(long)]
    pub json: bool,
    /// Directory for per-run trace CSVs.
    #[arg(long)]
    pub traces: Option<PathBuf>,
    /// Overrides the suite tolerance for every run.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Overrides the suite iteration cap for every run.
    #[arg(long)]
    pub max_iter: Option<usize>,
}

/// Binary entry point; returns the process exit code.
pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Gen { matrix, out } => cmd_gen(&matrix, &out),
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Report { input } => cmd_report(&input),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn parse_spec(s: &str) -> Result<MatrixSpec, CliError> {
    s.parse().map_err(|e| CliError::input("parse matrix spec", e))
}

pub fn cmd_gen(spec: &str, out: &Path) -> Result<i32, CliError> {
    let spec = parse_spec(spec)?;
    let a = gallery::generate(&spec).map_err(|e| CliError::input("generate matrix", e))?;
    mm::write_file(&a, out).map_err(|e| CliError::input("write matrix", e))?;
    Ok(EXIT_OK)
}

fn load_matrix(args: &SolveArgs) -> Result<SymMatrix, CliError> {
    match (&args.matrix, &args.input) {
        (Some(spec), _) => gallery::generate(&parse_spec(spec)?).map_err(|e| CliError::input("generate matrix", e)),
        (None, Some(path)) => mm::read_file(path).map_err(|e| CliError::input("read matrix", e)),
        (None, None) => Err(CliError::input("select matrix", "one of --matrix or --in is required")),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32, CliError> {
    let a = load_matrix(args)?;
    let overrides = Overrides {
        tol: args.tol,
        max_iter: args.max_iter,
        scale: args.scale.map(ScaleArg),
        step: args.step,
    };
    let mut cfg = overrides.apply(SolverConfig::default());
    cfg.validate().map_err(|e| CliError::input("configure solver", e))?;
    if args.trace.is_some() {
        cfg.record_trace = true;
        cfg.reference = sqrt_eig(&a).ok();
    }
    let kappa = condition_report(&a)
        .map(|c| bench::format_kappa(&c))
        .unwrap_or_else(|_| "nan".into());
    let r = args.method.solve(&a, &cfg).map_err(|e| CliError::input("solve", e))?;

    println!(
        "method={} n={} kappa={} iterations={} residual={:.3e} seconds={:.6} stop={}",
        args.method,
        a.n(),
        kappa,
        r.iterations,
        r.final_residual,
        r.elapsed_seconds,
        r.stop_reason
    );
    if let Some(path) = &args.trace {
        let f = std::fs::File::create(path).map_err(|e| CliError::input("write trace", e))?;
        bench::write_trace(&r.trace, std::io::BufWriter::new(f)).map_err(|e| CliError::input("write trace", e))?;
    }
    if let Some(path) = &args.out {
        mm::write_file(&r.root, path).map_err(|e| CliError::input("write root", e))?;
    }
    Ok(if r.converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let mut suite = suite::resolve(&args.suite)?;
    let flags = Overrides {
        tol: args.tol,
        max_iter: args.max_iter,
        ..Default::default()
    };
    for entry in &mut suite.entries {
        entry.cfg = flags.apply(entry.cfg.clone());
        entry.cfg.validate().map_err(|e| CliError::input("configure solver", e))?;
    }
    let runs = bench::run_suite(&suite, args.traces.as_deref(), bench::thread_cap())?;
    let rows: Vec<_> = runs.into_iter().map(|r| r.row).collect();
    let f = std::fs::File::create(&args.out).map_err(|e| CliError::input("write results", e))?;
    let w = std::io::BufWriter::new(f);
    if args.json {
        bench::write_json(&rows, w)?;
    } else {
        bench::write_csv(&rows, w)?;
    }
    let failed = rows.iter().filter(|r| !r.converged).count();
    println!(
        "suite={} runs={} not_converged={} out={}",
        suite.name,
        rows.len(),
        failed,
        args.out.display()
    );
    Ok(EXIT_OK)
}

pub fn cmd_report(input: &Path) -> Result<i32, CliError> {
    let f = std::fs::File::open(input).map_err(|e| CliError::input("read results", e))?;
    let rows = report::read_rows(f)?;
    print!("{}", report::render(&rows));
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn solve_requires_exactly_one_source() {
        assert!(Cli::try_parse_from(["psdroot", "solve", "--method", "eig"]).is_err());
        assert!(Cli::try_parse_from([
            "psdroot", "solve", "--method", "eig", "--matrix", "hilb:3", "--in", "x.mtx"
        ])
        .is_err());
        assert!(Cli::try_parse_from(["psdroot", "solve", "--method", "newton", "--matrix", "hilb:3"]).is_err());
        let cli = Cli::try_parse_from([
            "psdroot", "solve", "--method", "yamsr", "--matrix", "hilb:3", "--scale", "auto", "--max-iter", "7",
        ])
        .unwrap();
        match cli.command {
            Command::Solve(a) => {
                assert_eq!(a.method, Method::Yamsr);
                assert_eq!(a.scale, Some(ScaleMode::Auto));
                assert_eq!(a.max_iter, Some(7));
            }
            other => panic!("{other:?}"),
        }
    }
}
