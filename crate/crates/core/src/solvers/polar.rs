//! Square root through the polar decomposition of the Cholesky factor.
//!
//! Factor `A = RᵀR` and write `R = UH` with `U` orthogonal and `H` symmetric
//! positive definite. Then `RᵀR = H²`, so `A^{1/2} = H = UᵀR`. The orthogonal
//! factor comes from the scaled Newton iteration
//!
//! ```text
//! U₀ = R,   U_{k+1} = (μ_k U_k + μ_k⁻¹ U_k⁻ᵀ) / 2
//! ```
//!
//! with the (1, ∞)-norm scaling
//! `μ_k = ((‖U_k⁻¹‖₁‖U_k⁻¹‖_∞)/(‖U_k‖₁‖U_k‖_∞))^{1/4}`.

use nalgebra::DMatrix;

use super::{relative_residual, NewtonScaling, Recorder, Result, SolverConfig, SolverError, SolverResult, StopReason};
use crate::matcore::{self, cholesky, inf_norm, one_norm, SymMatrix};

fn hermitian_factor(u: &DMatrix<f64>, r: &DMatrix<f64>) -> crate::matcore::Result<SymMatrix> {
    SymMatrix::new(u.transpose() * r)
}

fn orthogonality_defect(u: &DMatrix<f64>) -> f64 {
    let n = u.nrows();
    matcore::frobenius(&(u.transpose() * u - DMatrix::identity(n, n)))
}

pub fn polar_newton(a: &SymMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg);
    let r = cholesky(a)?.upper().clone();

    let mut u = r.clone();
    let mut x = hermitian_factor(&u, &r)?;
    let mut res = relative_residual(&x, a);
    rec.record(0, || Some(x.clone()), res, || orthogonality_defect(&u));
    if res <= cfg.tol {
        return Ok(rec.finish(x, 0, StopReason::Residual, res, None));
    }

    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;
    for k in 1..=cfg.max_iter {
        let u_inv = u
            .clone()
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.is_finite()))
            .ok_or(SolverError::SingularIterate { iteration: k })?;
        let mu = match cfg.newton_scaling {
            NewtonScaling::None => 1.0,
            NewtonScaling::Optimal1Inf => {
                let num = one_norm(&u_inv) * inf_norm(&u_inv);
                let den = one_norm(&u) * inf_norm(&u);
                (num / den).sqrt().sqrt()
            }
        };
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(SolverError::SingularIterate { iteration: k });
        }
        let next = (&u * mu + u_inv.transpose() / mu) * 0.5;
        let step = one_norm(&(&next - &u));
        let size = one_norm(&next);
        u = next;
        iterations = k;
        x = hermitian_factor(&u, &r)?;
        res = relative_residual(&x, a);
        rec.record(k, || Some(x.clone()), res, || orthogonality_defect(&u));
        if res <= cfg.tol {
            stop = StopReason::Residual;
            break;
        }
        if step <= cfg.tol * size {
            stop = StopReason::Stagnation;
            break;
        }
    }
    Ok(rec.finish(x, iterations, stop, res, None))
}
