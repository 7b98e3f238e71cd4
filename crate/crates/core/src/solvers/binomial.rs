//! Binomial iteration.
//!
//! Scale `A = s(I − C)` with `s = (λ_max + λ_min)/2`, so that
//! `ρ(C) = (λ_max − λ_min)/(λ_max + λ_min) < 1`. Then
//! `(I − C)^{1/2} = I − Y` where `Y` is the limit of the quadratic recurrence
//! `Y₀ = 0, Y_{k+1} = (C + Y_k²)/2`, and `A^{1/2} = √s (I − Y)`.
//! Only matrix products are needed, but convergence slows to a crawl as
//! `ρ(C) → 1`.

use super::{relative_residual, Recorder, Result, SolverConfig, SolverResult, StopReason};
use crate::matcore::{eig_sym, LinalgError, SymMatrix};

pub fn binomial(a: &SymMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg);
    let n = a.n();
    let eig = eig_sym(a)?;
    let (lmax, lmin) = (eig.lambda_max(), eig.lambda_min());
    if !(lmin > 0.0) {
        return Err(LinalgError::NotPositiveDefinite {
            index: n - 1,
            pivot: lmin,
        }
        .into());
    }
    let s = 0.5 * (lmax + lmin);
    let root_scale = s.sqrt();
    // C = I − A/s
    let c = a.scale(-1.0 / s)?.shift(1.0)?;
    let root_of = |y: &SymMatrix| SymMatrix::identity(n).sub(y).and_then(|m| m.scale(root_scale));

    let mut y = SymMatrix::zeros(n);
    let mut x = root_of(&y)?;
    let mut res = relative_residual(&x, a);
    rec.record(0, || Some(x.clone()), res, || f64::NAN);
    if res <= cfg.tol {
        return Ok(rec.finish(x, 0, StopReason::Residual, res, None));
    }

    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;
    for k in 1..=cfg.max_iter {
        let next = SymMatrix::new((c.as_matrix() + y.as_matrix() * y.as_matrix()) * 0.5)?;
        let step = next.distance(&y);
        y = next;
        iterations = k;
        x = root_of(&y)?;
        res = relative_residual(&x, a);
        rec.record(k, || Some(x.clone()), res, || step);
        if res <= cfg.tol {
            stop = StopReason::Residual;
            break;
        }
        if step <= cfg.tol {
            stop = StopReason::Stagnation;
            break;
        }
    }
    Ok(rec.finish(x, iterations, stop, res, None))
}
