//! Running suites and writing results.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::suite::SuiteDefinition;
use super::CliError;
use crate::gallery::{self, condition_report, ConditionReport, MatrixSpec};
use crate::matcore::{sqrt_eig, SymMatrix};
use crate::solvers::{Method, SolverConfig, SolverResult, TraceRecord};

/// Exact column order of the results CSV.
pub const CSV_COLUMNS: [&str; 9] = [
    "suite",
    "matrix",
    "n",
    "kappa",
    "method",
    "converged",
    "iterations",
    "final_residual",
    "seconds",
];

pub const TRACE_HEADER: &str = "k,seconds,rel_residual,delta_T,objective";

/// Environment variable capping the worker count for `bench`.
pub const THREADS_ENV: &str = "PSDROOT_THREADS";

/// One results row. `kappa` is pre-formatted so that CSV and JSON agree;
/// it carries a trailing `*` when the estimate is numerically saturated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub suite: String,
    pub matrix: String,
    pub n: usize,
    pub kappa: String,
    pub method: String,
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BenchRun {
    pub spec: MatrixSpec,
    pub method: Method,
    pub cfg: SolverConfig,
    pub row: BenchRow,
    pub trace: Vec<TraceRecord>,
    pub trace_path: Option<PathBuf>,
}

pub fn format_kappa(c: &ConditionReport) -> String {
    let mark = if c.saturated { "*" } else { "" };
    if c.kappa.is_infinite() {
        format!("inf{mark}")
    } else {
        format!("{:.6e}{mark}", c.kappa)
    }
}

pub fn write_trace<W: Write>(trace: &[TraceRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for t in trace {
        writeln!(
            w,
            "{},{:.9},{:.16e},{:.16e},{:.16e}",
            t.k, t.elapsed_seconds, t.rel_residual, t.delta_t, t.objective
        )?;
    }
    w.flush()
}

fn trace_file_name(spec: &MatrixSpec, method: Method) -> String {
    format!("{}_{}.csv", spec.to_string().replace([':', '.'], "-"), method)
}

struct Prepared {
    a: Option<SymMatrix>,
    kappa: String,
    reference: Option<SymMatrix>,
}

fn prepare(spec: &MatrixSpec, want_reference: bool) -> Prepared {
    let Ok(a) = gallery::generate(spec) else {
        return Prepared {
            a: None,
            kappa: "nan".into(),
            reference: None,
        };
    };
    let kappa = condition_report(&a).map(|c| format_kappa(&c)).unwrap_or_else(|_| "nan".into());
    let reference = if want_reference { sqrt_eig(&a).ok() } else { None };
    Prepared {
        a: Some(a),
        kappa,
        reference,
    }
}

fn run_one(
    suite: &str,
    spec: &MatrixSpec,
    prepared: &Prepared,
    method: Method,
    cfg: &SolverConfig,
    traces: Option<&Path>,
) -> BenchRun {
    let mut cfg = cfg.clone();
    if traces.is_some() {
        cfg.record_trace = true;
        cfg.reference = prepared.reference.clone();
    }
    let result: Option<SolverResult> = prepared.a.as_ref().and_then(|a| method.solve(a, &cfg).ok());
    let row = BenchRow {
        suite: suite.to_string(),
        matrix: spec.to_string(),
        n: spec.n(),
        kappa: prepared.kappa.clone(),
        method: method.to_string(),
        converged: result.as_ref().is_some_and(|r| r.converged),
        iterations: result.as_ref().map_or(0, |r| r.iterations),
        final_residual: result.as_ref().map_or(f64::NAN, |r| r.final_residual),
        seconds: result.as_ref().map_or(0.0, |r| r.elapsed_seconds),
    };
    BenchRun {
        spec: *spec,
        method,
        trace_path: traces.map(|d| d.join(trace_file_name(spec, method))),
        trace: result.map(|r| r.trace).unwrap_or_default(),
        cfg,
        row,
    }
}

/// Worker count from `PSDROOT_THREADS`, defaulting to 1 so that timings are
/// not perturbed by neighbouring runs.
pub fn thread_cap() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(1)
}

/// Runs every (matrix, method) pair of the suite. Results come back in suite
/// order regardless of scheduling. A solver failure becomes a row with
/// `converged = false`.
pub fn run_suite(suite: &SuiteDefinition, traces: Option<&Path>, threads: usize) -> Result<Vec<BenchRun>, CliError> {
    if let Some(dir) = traces {
        std::fs::create_dir_all(dir).map_err(|e| CliError::input("create trace directory", e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::input("start worker pool", e))?;
    let runs = pool.install(|| {
        suite
            .entries
            .par_iter()
            .flat_map_iter(|entry| {
                let prepared = prepare(&entry.spec, traces.is_some());
                entry
                    .methods
                    .iter()
                    .map(|&m| run_one(&suite.name, &entry.spec, &prepared, m, &entry.cfg, traces))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    });
    for run in &runs {
        if let Some(path) = &run.trace_path {
            let f = std::fs::File::create(path).map_err(|e| CliError::input("write trace", e))?;
            write_trace(&run.trace, std::io::BufWriter::new(f)).map_err(|e| CliError::input("write trace", e))?;
        }
    }
    Ok(runs)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], w: W) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS).map_err(|e| CliError::input("write results", e))?;
    for r in rows {
        out.write_record([
            r.suite.clone(),
            r.matrix.clone(),
            r.n.to_string(),
            r.kappa.clone(),
            r.method.clone(),
            r.converged.to_string(),
            r.iterations.to_string(),
            format!("{:.6e}", r.final_residual),
            format!("{:.6}", r.seconds),
        ])
        .map_err(|e| CliError::input("write results", e))?;
    }
    out.flush().map_err(|e| CliError::input("write results", e))
}

pub fn write_json<W: Write>(rows: &[BenchRow], mut w: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, rows).map_err(|e| CliError::input("write results", e))?;
    writeln!(w).map_err(|e| CliError::input("write results", e))
}
