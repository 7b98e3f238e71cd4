//! Geodesic fixed-point iteration for `A^{1/2}`.
//!
//! Minimizing `δ_S²(X, A) + δ_S²(X, I)` over the positive definite cone gives
//! the optimality condition `X⁻¹ = (X + A)⁻¹ + (X + I)⁻¹`, solved by the
//! fixed-point map
//!
//! ```text
//! G(X) = [(X + A)⁻¹ + (X + I)⁻¹]⁻¹,   X₀ = (A + I)/2.
//! ```
//!
//! `G` is a strict contraction in the Thompson metric with rate
//! [`gamma_bound`](crate::geometry::gamma_bound) for positive definite `A`,
//! and stays well defined for semidefinite `A` because `X + I ⪰ I`.
//!
//! With a scale `α`, the map runs on `A/α` (equivalently: `I` is replaced by
//! `αI`) and the root is multiplied back by `√α`.


use super::{relative_residual, Recorder, Result, SolverConfig, SolverResult, StopReason};
use crate::geometry;
use crate::matcore::{cholesky, inverse_spd, SymMatrix};

/// One application of `G(X) = [(X + A)⁻¹ + (X + I)⁻¹]⁻¹`.
///
/// Each inverse comes from a Cholesky factor as `R⁻¹R⁻ᵀ`.
pub fn yamsr_step(x: &SymMatrix, a: &SymMatrix) -> Result<SymMatrix> {
    let r1 = cholesky(&x.add(a)?)?.inverse()?;
    let r2 = cholesky(&x.shift(1.0)?)?.inverse()?;
    Ok(cholesky(&r1.add(&r2)?)?.inverse()?)
}

/// The invariant interval `[2(I + A⁻¹)⁻¹, (A + I)/2]` of the fixed-point map:
/// harmonic and arithmetic means of `A` and `I`, bracketing `A^{1/2}`.
pub fn initial_interval(a: &SymMatrix) -> Result<(SymMatrix, SymMatrix)> {
    let a_inv = inverse_spd(a)?;
    let lo = inverse_spd(&a_inv.shift(1.0)?)?.scale(2.0)?;
    let hi = a.shift(1.0)?.scale(0.5)?;
    Ok((lo, hi))
}

/// `max_i |log(y_ii/x_ii)|`: Rayleigh quotients at the unit vectors lie in
/// the generalized spectrum, so this never exceeds `δ_T(X, Y)`.
fn thompson_lower_bound(x: &SymMatrix, y: &SymMatrix) -> f64 {
    (0..x.n())
        .map(|i| (y.get(i, i) / x.get(i, i)).ln().abs())
        .fold(0.0, f64::max)
}

/// Runs the fixed-point iteration from `X₀ = (A_s + I)/2`.
pub fn yamsr(a: &SymMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
    let alpha = cfg.scale.alpha(a);
    let a_s = a.scale(1.0 / alpha)?;
    let y0 = a_s.shift(1.0)?.scale(0.5)?;
    run(a, a_s, alpha, y0, cfg)
}

/// Runs the fixed-point iteration from an arbitrary positive definite
/// estimate `x0` of the (unscaled) root.
pub fn yamsr_with_start(a: &SymMatrix, x0: &SymMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
    if x0.n() != a.n() {
        return Err(crate::matcore::LinalgError::DimensionMismatch {
            left: a.n(),
            right: x0.n(),
        }
        .into());
    }
    let alpha = cfg.scale.alpha(a);
    let a_s = a.scale(1.0 / alpha)?;
    let y0 = x0.scale(1.0 / alpha.sqrt())?;
    run(a, a_s, alpha, y0, cfg)
}

fn run(a: &SymMatrix, a_s: SymMatrix, alpha: f64, y0: SymMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg);
    let root_of = |y: &SymMatrix| y.scale(alpha.sqrt()).ok();
    let objective = |y: &SymMatrix| {
        root_of(y)
            .and_then(|x| geometry::sqrt_objective(&x, a).ok())
            .unwrap_or(f64::NAN)
    };

    let gamma = rec.exclude(|| geometry::gamma_bound(&a_s).ok());

    let mut y = y0;
    // Relative residual is invariant under the α-rescaling.
    let mut res = relative_residual(&y, &a_s);
    rec.record(0, || root_of(&y), res, || objective(&y));
    if res <= cfg.tol {
        let root = y.scale(alpha.sqrt())?;
        return Ok(rec.finish(root, 0, StopReason::Residual, res, gamma));
    }

    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;
    for k in 1..=cfg.max_iter {
        let next = yamsr_step(&y, &a_s)?;
        res = relative_residual(&next, &a_s);
        iterations = k;
        let moved = if res <= cfg.tol || thompson_lower_bound(&y, &next) > cfg.tol {
            f64::INFINITY
        } else {
            geometry::thompson_metric(&y, &next).unwrap_or(f64::INFINITY)
        };
        y = next;
        rec.record(k, || root_of(&y), res, || objective(&y));
        if res <= cfg.tol {
            stop = StopReason::Residual;
            break;
        }
        if moved <= cfg.tol {
            stop = StopReason::Stagnation;
            break;
        }
    }
    let root = y.scale(alpha.sqrt())?;
    Ok(rec.finish(root, iterations, stop, res, gamma))
}
