//! Iterative matrix square-root solvers sharing one configuration, one
//! stopping rule and one per-iteration trace format.
//!
//! | method            | iteration                                        |
//! |-------------------|--------------------------------------------------|
//! | [`yamsr`]         | `X ← [(X + A)⁻¹ + (X + I)⁻¹]⁻¹`, `X₀ = (A + I)/2` |
//! | [`gradient_descent`] | fixed-step descent on `‖X² − A‖_F²`           |
//! | [`lsgd`]          | the same objective with Armijo backtracking      |
//! | [`polar_newton`]  | scaled Newton for the polar factor of `R`, `A = RᵀR` |
//! | [`binomial`]      | `Y ← (C + Y²)/2` with `C = I − A/s`              |
//!
//! Every solver stops as soon as the relative residual
//! `‖X_k² − A‖_F / ‖A‖_F` drops to `tol`, on its own stagnation test, or at
//! `max_iter`. Every iterate is explicitly symmetrized.

mod binomial;
mod gradient;
mod polar;
mod yamsr;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::geometry::{self, GammaBound};
use crate::matcore::{self, LinalgError, SymMatrix};

pub use binomial::binomial;
pub use gradient::{default_gd_step, gradient, gradient_descent, lsgd, objective};
pub use polar::polar_newton;
pub use yamsr::{initial_interval, yamsr, yamsr_step, yamsr_with_start};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("iterate became numerically singular at iteration {iteration}")]
    SingularIterate { iteration: usize },
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// How YAMSR rescales its input before iterating.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ScaleMode {
    /// Iterate on `A` itself (`α = 1`).
    #[default]
    None,
    /// `α = tr(A)/√n`.
    Auto,
    Explicit(f64),
}

impl FromStr for ScaleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "auto" => Ok(Self::Auto),
            other => other
                .parse::<f64>()
                .map(Self::Explicit)
                .map_err(|_| format!("scale must be `auto`, `none` or a positive number, got `{other}`")),
        }
    }
}

impl fmt::Display for ScaleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::Auto => f.write_str("auto"),
            Self::Explicit(a) => write!(f, "{a}"),
        }
    }
}

impl ScaleMode {
    /// The scalar `α` for input `a`. Auto falls back to 1 for a traceless input.
    pub fn alpha(&self, a: &SymMatrix) -> f64 {
        match *self {
            Self::None => 1.0,
            Self::Explicit(alpha) => alpha,
            Self::Auto => {
                let alpha = a.trace() / (a.n() as f64).sqrt();
                if alpha > 0.0 && alpha.is_finite() {
                    alpha
                } else {
                    1.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NewtonScaling {
    /// `μ_k = ((‖U⁻¹‖₁‖U⁻¹‖_∞)/(‖U‖₁‖U‖_∞))^{1/4}`.
    #[default]
    Optimal1Inf,
    None,
}

/// Armijo backtracking constants for [`lsgd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    /// Sufficient-decrease constant.
    pub c: f64,
    /// Step shrink factor on rejection.
    pub shrink: f64,
    /// Each search starts at `growth ×` the previous accepted step.
    pub growth: f64,
    /// The search is abandoned once the step falls below this.
    pub min_step: f64,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            c: 1e-4,
            shrink: 0.5,
            growth: 2.0,
            min_step: 1e-18,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Target relative residual `‖X² − A‖_F / ‖A‖_F`.
    pub tol: f64,
    pub max_iter: usize,
    pub scale: ScaleMode,
    /// Fixed gradient-descent step; `None` selects [`default_gd_step`].
    pub gd_step: Option<f64>,
    pub line_search: LineSearchParams,
    pub newton_scaling: NewtonScaling,
    pub record_trace: bool,
    /// Known square root; when present the trace records the Thompson
    /// distance of every iterate to it.
    pub reference: Option<SymMatrix>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 1000,
            scale: ScaleMode::None,
            gd_step: None,
            line_search: LineSearchParams::default(),
            newton_scaling: NewtonScaling::default(),
            record_trace: false,
            reference: None,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_scale(mut self, scale: ScaleMode) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn with_reference(mut self, root: SymMatrix) -> Self {
        self.reference = Some(root);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if let ScaleMode::Explicit(a) = self.scale {
            if !(a > 0.0 && a.is_finite()) {
                return bad(format!("explicit scale must be positive, got {a}"));
            }
        }
        if let Some(eta) = self.gd_step {
            if !(eta > 0.0 && eta.is_finite()) {
                return bad(format!("gradient step must be positive, got {eta}"));
            }
        }
        let ls = &self.line_search;
        if !(ls.c > 0.0 && ls.c < 1.0 && ls.shrink > 0.0 && ls.shrink < 1.0 && ls.growth >= 1.0) {
            return bad(format!("invalid line-search parameters {ls:?}"));
        }
        Ok(())
    }
}

/// Why a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Relative residual reached `tol`.
    Residual,
    /// Successive iterates stopped moving (Thompson distance for YAMSR,
    /// iterate difference for polar Newton and binomial).
    Stagnation,
    /// Closed-form method; no iteration.
    Direct,
    MaxIterations,
    /// Fixed-step gradient descent blew up.
    Diverged,
    /// Armijo backtracking shrank the step below its floor.
    LineSearchStall,
}

impl StopReason {
    pub fn is_converged(self) -> bool {
        matches!(self, Self::Residual | Self::Stagnation | Self::Direct)
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Residual => "residual",
            Self::Stagnation => "stagnation",
            Self::Direct => "direct",
            Self::MaxIterations => "max-iterations",
            Self::Diverged => "diverged",
            Self::LineSearchStall => "line-search-stall",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    /// Solver time since start, excluding trace-only instrumentation.
    pub elapsed_seconds: f64,
    pub rel_residual: f64,
    /// Thompson distance to the reference root; NaN without a reference.
    pub delta_t: f64,
    /// Method-specific objective; NaN where undefined.
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub root: SymMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub final_residual: f64,
    pub elapsed_seconds: f64,
    pub trace: Vec<TraceRecord>,
    /// YAMSR only, when the (scaled) input is positive definite.
    pub gamma_certificate: Option<GammaBound>,
}

/// `‖X² − A‖_F / ‖A‖_F`, or the absolute residual when `A = 0`.
pub fn relative_residual(x: &SymMatrix, a: &SymMatrix) -> f64 {
    let x2 = x.as_matrix() * x.as_matrix();
    let r = matcore::frobenius(&(x2 - a.as_matrix()));
    let na = a.frobenius_norm();
    if na > 0.0 {
        r / na
    } else {
        r
    }
}

/// Monotonic clock that can exclude instrumentation from the reported time.
pub(crate) struct Clock {
    start: Instant,
    excluded: Duration,
}

impl Clock {
    pub(crate) fn start() -> Self {
        Self {
            start: Instant::now(),
            excluded: Duration::ZERO,
        }
    }

    pub(crate) fn seconds(&self) -> f64 {
        self.start.elapsed().saturating_sub(self.excluded).as_secs_f64()
    }

    pub(crate) fn exclude<T>(&mut self, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.excluded += t.elapsed();
        out
    }
}

/// Per-run bookkeeping shared by all solvers.
pub(crate) struct Recorder<'a> {
    cfg: &'a SolverConfig,
    clock: Clock,
    trace: Vec<TraceRecord>,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(cfg: &'a SolverConfig) -> Self {
        Self {
            cfg,
            clock: Clock::start(),
            trace: Vec::new(),
        }
    }

    /// Records iteration `k` with current root estimate `root`. The
    /// objective closure runs only when tracing is enabled.
    pub(crate) fn record(
        &mut self,
        k: usize,
        root: impl FnOnce() -> Option<SymMatrix>,
        rel_residual: f64,
        objective: impl FnOnce() -> f64,
    ) {
        if !self.cfg.record_trace {
            return;
        }
        let elapsed_seconds = self.clock.seconds();
        let reference = self.cfg.reference.as_ref();
        let (delta_t, objective) = self.clock.exclude(|| {
            let delta_t = match (reference, root()) {
                (Some(r), Some(x)) => geometry::thompson_metric(&x, r).unwrap_or(f64::NAN),
                _ => f64::NAN,
            };
            (delta_t, objective())
        });
        self.trace.push(TraceRecord {
            k,
            elapsed_seconds,
            rel_residual,
            delta_t,
            objective,
        });
    }

    pub(crate) fn exclude<T>(&mut self, f: impl FnOnce() -> T) -> T {
        self.clock.exclude(f)
    }

    pub(crate) fn finish(
        self,
        root: SymMatrix,
        iterations: usize,
        stop_reason: StopReason,
        final_residual: f64,
        gamma_certificate: Option<GammaBound>,
    ) -> SolverResult {
        SolverResult {
            root,
            iterations,
            converged: stop_reason.is_converged(),
            stop_reason,
            final_residual,
            elapsed_seconds: self.clock.seconds(),
            trace: self.trace,
            gamma_certificate,
        }
    }
}

/// The eigendecomposition square root packaged as a solver result.
pub fn eig_direct(a: &SymMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg);
    let root = matcore::sqrt_eig(a)?;
    let res = relative_residual(&root, a);
    rec.record(0, || Some(root.clone()), res, || f64::NAN);
    Ok(rec.finish(root, 0, StopReason::Direct, res, None))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Yamsr,
    Gd,
    Lsgd,
    Pn,
    Binomial,
    Eig,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Yamsr,
        Method::Gd,
        Method::Lsgd,
        Method::Pn,
        Method::Binomial,
        Method::Eig,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Yamsr => "yamsr",
            Self::Gd => "gd",
            Self::Lsgd => "lsgd",
            Self::Pn => "pn",
            Self::Binomial => "binomial",
            Self::Eig => "eig",
        }
    }

    pub fn solve(self, a: &SymMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
        match self {
            Self::Yamsr => yamsr(a, cfg),
            Self::Gd => gradient_descent(a, cfg),
            Self::Lsgd => lsgd(a, cfg),
            Self::Pn => polar_newton(a, cfg),
            Self::Binomial => binomial(a, cfg),
            Self::Eig => eig_direct(a, cfg),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                format!("unknown method `{s}` (expected one of yamsr, gd, lsgd, pn, binomial, eig)")
            })
    }
}
