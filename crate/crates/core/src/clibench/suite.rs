//! Benchmark suite definitions: built-in suites and TOML suite files.
//!
//! A suite file looks like
//!
//! ```toml
//! name = "small"
//! tol = 1e-10          # optional suite-wide defaults
//! max_iter = 2000
//!
//! [[run]]
//! matrix = "hilb:10"
//! methods = ["yamsr", "pn"]
//! scale = "auto"       # optional per-run overrides: tol, max_iter, scale, step
//! ```

use std::path::Path;

use serde::Deserialize;

use super::CliError;
use crate::gallery::MatrixSpec;
use crate::solvers::{Method, ScaleMode, SolverConfig};

/// One matrix with the methods to run on it and their shared configuration.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub spec: MatrixSpec,
    pub methods: Vec<Method>,
    pub cfg: SolverConfig,
}

#[derive(Debug, Clone)]
pub struct SuiteDefinition {
    pub name: String,
    pub entries: Vec<SuiteEntry>,
}

/// Solver settings a suite (or the command line) may override.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub scale: Option<ScaleArg>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(try_from = "toml::Value")]
pub struct ScaleArg(pub ScaleMode);

impl TryFrom<toml::Value> for ScaleArg {
    type Error = String;

    fn try_from(v: toml::Value) -> Result<Self, Self::Error> {
        match v {
            toml::Value::String(s) => s.parse().map(ScaleArg),
            toml::Value::Float(f) => Ok(ScaleArg(ScaleMode::Explicit(f))),
            toml::Value::Integer(i) => Ok(ScaleArg(ScaleMode::Explicit(i as f64))),
            other => Err(format!("scale must be a string or number, got {other}")),
        }
    }
}

impl Overrides {
    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            tol: self.tol.or(base.tol),
            max_iter: self.max_iter.or(base.max_iter),
            scale: self.scale.or(base.scale),
            step: self.step.or(base.step),
        }
    }

    pub fn apply(self, mut cfg: SolverConfig) -> SolverConfig {
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        if let Some(ScaleArg(s)) = self.scale {
            cfg.scale = s;
        }
        if self.step.is_some() {
            cfg.gd_step = self.step;
        }
        cfg
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    name: Option<String>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    scale: Option<ScaleArg>,
    step: Option<f64>,
    #[serde(default)]
    run: Vec<RunFile>,
}

// Fields are spelled out rather than flattened: serde cannot combine
// `flatten` with `deny_unknown_fields`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    matrix: String,
    methods: Vec<String>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    scale: Option<ScaleArg>,
    step: Option<f64>,
}

const SEED: u64 = 1;

fn entry(spec: MatrixSpec, methods: &[Method], cfg: &SolverConfig) -> SuiteEntry {
    SuiteEntry {
        spec,
        methods: methods.to_vec(),
        cfg: cfg.clone(),
    }
}

/// Full-size analogue of the published comparison: five matrix classes,
/// three methods each, plus fixed-step gradient descent on the spiked matrix.
fn paper() -> SuiteDefinition {
    use Method::*;
    let cfg = SolverConfig::default();
    let three = [Yamsr, Lsgd, Pn];
    SuiteDefinition {
        name: "paper".into(),
        entries: vec![
            entry(
                MatrixSpec::Spiked {
                    n: 50,
                    r: 5,
                    beta: crate::gallery::DEFAULT_SPIKE_BETA,
                    seed: SEED,
                },
                &[Yamsr, Lsgd, Pn, Gd],
                &cfg,
            ),
            entry(MatrixSpec::Hilbert { n: 50 }, &three, &cfg),
            entry(MatrixSpec::InvHilbert { n: 100 }, &three, &cfg),
            entry(MatrixSpec::RandCorr { n: 500, seed: SEED }, &three, &cfg),
            entry(MatrixSpec::LowRank { n: 500, r: 50, seed: SEED }, &three, &cfg),
        ],
    }
}

/// Small enough to run in seconds; stops at 1e-8.
fn paper_desk() -> SuiteDefinition {
    use Method::*;
    let cfg = SolverConfig::default().with_tol(1e-8);
    let three = [Pn, Yamsr, Lsgd];
    SuiteDefinition {
        name: "paper-desk".into(),
        entries: vec![
            entry(
                MatrixSpec::Spiked {
                    n: 50,
                    r: 5,
                    beta: crate::gallery::DEFAULT_SPIKE_BETA,
                    seed: SEED,
                },
                &three,
                &cfg,
            ),
            entry(MatrixSpec::Hilbert { n: 50 }, &three, &cfg),
            entry(MatrixSpec::RandCorr { n: 100, seed: SEED }, &three, &cfg),
            entry(MatrixSpec::LowRank { n: 100, r: 10, seed: SEED }, &three, &cfg),
        ],
    }
}

pub const BUILTIN_SUITES: [&str; 2] = ["paper", "paper-desk"];

pub fn builtin(name: &str) -> Option<SuiteDefinition> {
    match name {
        "paper" => Some(paper()),
        "paper-desk" => Some(paper_desk()),
        _ => None,
    }
}

pub fn parse_suite(text: &str, fallback_name: &str) -> Result<SuiteDefinition, CliError> {
    let file: SuiteFile = toml::from_str(text).map_err(|e| CliError::input("parse suite", e))?;
    let defaults = Overrides {
        tol: file.tol,
        max_iter: file.max_iter,
        scale: file.scale,
        step: file.step,
    };
    let mut entries = Vec::with_capacity(file.run.len());
    for run in file.run {
        let spec: MatrixSpec = run.matrix.parse().map_err(|e| CliError::input("parse suite", e))?;
        let methods = run
            .methods
            .iter()
            .map(|m| m.parse::<Method>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::input("parse suite", e))?;
        let own = Overrides {
            tol: run.tol,
            max_iter: run.max_iter,
            scale: run.scale,
            step: run.step,
        };
        let cfg = own.over(defaults).apply(SolverConfig::default());
        cfg.validate().map_err(|e| CliError::input("parse suite", e))?;
        entries.push(SuiteEntry { spec, methods, cfg });
    }
    Ok(SuiteDefinition {
        name: file.name.unwrap_or_else(|| fallback_name.to_string()),
        entries,
    })
}

/// A built-in suite name, or a path to a suite file.
pub fn resolve(name_or_path: &str) -> Result<SuiteDefinition, CliError> {
    if let Some(s) = builtin(name_or_path) {
        return Ok(s);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(CliError::input(
            "resolve suite",
            format!(
                "`{name_or_path}` is neither a built-in suite ({}) nor an existing file",
                BUILTIN_SUITES.join(", ")
            ),
        ));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input("read suite", e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
    parse_suite(&text, stem)
}
