//! Euclidean gradient descent on `f(X) = ‖X² − A‖_F²`.
//!
//! With `E = X² − A`, the gradient with respect to the entries of `X` is
//! `∇f(X) = 2(EX + XE)`. [`gradient_descent`] takes fixed steps;
//! [`lsgd`] picks each step by Armijo backtracking.

use nalgebra::DMatrix;

use super::{Recorder, Result, SolverConfig, SolverResult, StopReason};
use crate::matcore::{self, cholesky, operator_norm, SymMatrix};

/// Relative residual growth beyond which fixed-step descent is declared
/// divergent.
const DIVERGENCE_FACTOR: f64 = 1e6;

/// `‖X² − A‖_F²`.
pub fn objective(x: &SymMatrix, a: &SymMatrix) -> f64 {
    let e = x.as_matrix() * x.as_matrix() - a.as_matrix();
    let r = matcore::frobenius(&e);
    r * r
}

/// `2(EX + XE)` with `E = X² − A`.
pub fn gradient(x: &SymMatrix, a: &SymMatrix) -> Result<SymMatrix> {
    let e = x.as_matrix() * x.as_matrix() - a.as_matrix();
    Ok(gradient_from_residual(&e, x)?)
}

fn gradient_from_residual(e: &DMatrix<f64>, x: &SymMatrix) -> crate::matcore::Result<SymMatrix> {
    // X and E are symmetric, so XE = (EX)ᵀ.
    let ex = e * x.as_matrix();
    let g = (&ex + ex.transpose()) * 2.0;
    SymMatrix::new(g)
}

/// Default fixed step `1/L₀` with `L₀ = 3(1 + ‖A‖)² + 4‖A‖`, a bound on the
/// gradient's Lipschitz constant over `‖X‖ ≤ (1 + ‖A‖)/2`.
pub fn default_gd_step(norm_a: f64) -> f64 {
    1.0 / (3.0 * (1.0 + norm_a).powi(2) + 4.0 * norm_a)
}

struct State {
    x: SymMatrix,
    e: DMatrix<f64>,
    f: f64,
}

impl State {
    fn new(x: SymMatrix, a: &SymMatrix) -> Self {
        let e = x.as_matrix() * x.as_matrix() - a.as_matrix();
        let r = matcore::frobenius(&e);
        Self { x, e, f: r * r }
    }

    fn rel_residual(&self, norm_a_fro: f64) -> f64 {
        let r = self.f.sqrt();
        if norm_a_fro > 0.0 {
            r / norm_a_fro
        } else {
            r
        }
    }
}

/// Fixed-step gradient descent from `X₀ = (A + I)/2`.
pub fn gradient_descent(a: &SymMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg);
    let eta = match cfg.gd_step {
        Some(eta) => eta,
        None => default_gd_step(operator_norm(a)?),
    };
    let na = a.frobenius_norm();

    let mut s = State::new(a.shift(1.0)?.scale(0.5)?, a);
    let mut res = s.rel_residual(na);
    let res0 = res;
    rec.record(0, || Some(s.x.clone()), res, || s.f);
    if res <= cfg.tol {
        return Ok(rec.finish(s.x, 0, StopReason::Residual, res, None));
    }

    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;
    for k in 1..=cfg.max_iter {
        // The gradient is cubic in X and overflows first on badly scaled input.
        let Ok(g) = gradient_from_residual(&s.e, &s.x) else {
            stop = StopReason::Diverged;
            break;
        };
        let next = match SymMatrix::new(s.x.as_matrix() - g.as_matrix() * eta) {
            Ok(x) => x,
            Err(_) => {
                stop = StopReason::Diverged;
                break;
            }
        };
        let candidate = State::new(next, a);
        let r = candidate.rel_residual(na);
        iterations = k;
        if !r.is_finite() || r > DIVERGENCE_FACTOR * res0 {
            stop = StopReason::Diverged;
            res = r;
            break;
        }
        s = candidate;
        res = r;
        rec.record(k, || Some(s.x.clone()), res, || s.f);
        if res <= cfg.tol {
            stop = StopReason::Residual;
            break;
        }
    }
    Ok(rec.finish(s.x, iterations, stop, res, None))
}

/// Gradient descent with Armijo backtracking from `X₀ = (A + I)/2`.
///
/// The first trial step is `1/‖A‖₂`; each later search starts from
/// `growth ×` the previously accepted step and shrinks until
/// `f(X − ηG) ≤ f(X) − c·η·‖G‖_F²`. The objective is monotonically
/// nonincreasing.
pub fn lsgd(a: &SymMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let ls = cfg.line_search;
    let mut rec = Recorder::new(cfg);
    let norm_a = operator_norm(a)?;
    let na = a.frobenius_norm();

    let mut s = State::new(a.shift(1.0)?.scale(0.5)?, a);
    let mut res = s.rel_residual(na);
    rec.record(0, || Some(s.x.clone()), res, || s.f);
    if res <= cfg.tol {
        return Ok(rec.finish(s.x, 0, StopReason::Residual, res, None));
    }

    let mut trial = if norm_a > 0.0 { 1.0 / norm_a } else { 1.0 };
    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;
    'outer: for k in 1..=cfg.max_iter {
        let g = match gradient_from_residual(&s.e, &s.x) {
            Ok(g) if s.f.is_finite() => g,
            _ => {
                stop = StopReason::Diverged;
                break;
            }
        };
        let g2 = {
            let n = g.frobenius_norm();
            n * n
        };
        if g2 == 0.0 {
            // Stationary but not at the root.
            stop = StopReason::LineSearchStall;
            break;
        }
        let mut eta = trial;
        let accepted = loop {
            if eta < ls.min_step {
                stop = StopReason::LineSearchStall;
                break 'outer;
            }
            // Trial points must stay in the positive definite cone; otherwise
            // long steps can land near a non-principal root.
            let trial_x = SymMatrix::new(s.x.as_matrix() - g.as_matrix() * eta).ok();
            if let Some(x) = trial_x.filter(|x| cholesky(x).is_ok()) {
                let cand = State::new(x, a);
                if cand.f <= s.f - ls.c * eta * g2 {
                    break cand;
                }
            }
            eta *= ls.shrink;
        };
        iterations = k;
        s = accepted;
        trial = eta * ls.growth;
        res = s.rel_residual(na);
        rec.record(k, || Some(s.x.clone()), res, || s.f);
        if res <= cfg.tol {
            stop = StopReason::Residual;
            break;
        }
    }
    Ok(rec.finish(s.x, iterations, stop, res, None))
}
