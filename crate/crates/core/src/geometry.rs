//! Geometry of the positive definite cone.
//!
//! * S-divergence `δ_S²(X, Y) = log det((X+Y)/2) − ½ log det X − ½ log det Y`,
//!   and its rank-deficient extension built on `det_r`.
//! * Thompson part metric `δ_T(X, Y) = ‖log(X^{-1/2} Y X^{-1/2})‖₂`, the metric
//!   under which the fixed-point square-root map contracts.
//! * Geodesics `X #_t Y = X^{1/2}(X^{-1/2} Y X^{-1/2})^t X^{1/2}` and the
//!   geometric mean `X #_{1/2} Y`.
//! * The explicit contraction rate of the fixed-point map, [`gamma_bound`].
//!
//! Everything here is a ground-truth facility built on the Cholesky
//! factorization and the eigendecomposition; none of it is on a solver's hot
//! path except the optional trace objective.

use thiserror::Error;

use crate::matcore::{self, cholesky, eig_sym, spd_power, LinalgError, SymMatrix};

/// Default relative eigenvalue cutoff for the rank of a PSD matrix in
/// [`s_divergence_lowrank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("geodesic parameter t = {0} is outside [0, 1]")]
    Domain(f64),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

fn same_dim(x: &SymMatrix, y: &SymMatrix) -> Result<()> {
    if x.n() != y.n() {
        return Err(LinalgError::DimensionMismatch {
            left: x.n(),
            right: y.n(),
        }
        .into());
    }
    Ok(())
}

/// S-divergence of two positive definite matrices, via Cholesky
/// log-determinants. Symmetric and nonnegative up to round-off.
pub fn s_divergence(x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    same_dim(x, y)?;
    let mid = x.add(y)?.scale(0.5)?;
    let ld_mid = cholesky(&mid)?.log_det();
    let ld_x = cholesky(x)?.log_det();
    let ld_y = cholesky(y)?.log_det();
    Ok(ld_mid - 0.5 * ld_x - 0.5 * ld_y)
}

/// Numerical rank: eigenvalues above `rank_tol·λ_max`.
pub fn numerical_rank(eigenvalues: &[f64], rank_tol: f64) -> usize {
    let lambda_max = eigenvalues.iter().copied().fold(0.0, f64::max);
    if lambda_max <= 0.0 {
        return 0;
    }
    eigenvalues
        .iter()
        .filter(|&&l| l > rank_tol * lambda_max)
        .count()
}

/// `log det_r`: sum of the logs of the `r` largest eigenvalues.
fn log_det_r(sorted_desc: &[f64], r: usize) -> f64 {
    sorted_desc[..r].iter().map(|l| l.ln()).sum()
}

/// S-divergence extended to rank-deficient PSD matrices.
///
/// Returns `+∞` when the numerical ranks differ. Otherwise, with `r` the
/// common rank, evaluates the divergence formula with `det` replaced by the
/// product of the `r` largest eigenvalues (of the midpoint as well, even if
/// the midpoint has larger rank because the ranges differ).
pub fn s_divergence_lowrank(x: &SymMatrix, y: &SymMatrix, rank_tol: f64) -> Result<f64> {
    same_dim(x, y)?;
    let ex = eig_sym(x)?;
    let ey = eig_sym(y)?;
    let rx = numerical_rank(&ex.eigenvalues, rank_tol);
    let ry = numerical_rank(&ey.eigenvalues, rank_tol);
    if rx != ry {
        return Ok(f64::INFINITY);
    }
    if rx == 0 {
        return Ok(0.0);
    }
    let mid = eig_sym(&x.add(y)?.scale(0.5)?)?;
    Ok(log_det_r(&mid.eigenvalues, rx)
        - 0.5 * log_det_r(&ex.eigenvalues, rx)
        - 0.5 * log_det_r(&ey.eigenvalues, rx))
}

/// Eigenvalues of `L⁻¹ Y L⁻ᵀ` where `X = LLᵀ`, i.e. the generalized
/// eigenvalues of the pencil `(Y, X)`, sorted descending.
pub fn generalized_eigenvalues(x: &SymMatrix, y: &SymMatrix) -> Result<Vec<f64>> {
    same_dim(x, y)?;
    let chol = cholesky(x)?;
    let w = chol.solve_lower(y.as_matrix());
    let m = chol.solve_lower(&w.transpose());
    Ok(matcore::eigenvalues_sym(&SymMatrix::new(m)?))
}

/// Thompson part metric `max_i |log λ_i(X⁻¹Y)|`.
pub fn thompson_metric(x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    let lam = generalized_eigenvalues(x, y)?;
    let hi = lam[0];
    let lo = *lam.last().expect("non-empty");
    if !(lo > 0.0) {
        return Err(LinalgError::NotPositiveDefinite {
            index: lam.len() - 1,
            pivot: lo,
        }
        .into());
    }
    Ok(hi.ln().abs().max(lo.ln().abs()))
}

/// Point at parameter `t ∈ [0, 1]` on the geodesic from `x` to `y`.
pub fn geodesic(x: &SymMatrix, y: &SymMatrix, t: f64) -> Result<SymMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(GeometryError::Domain(t));
    }
    same_dim(x, y)?;
    // Validates positive definiteness of both endpoints.
    cholesky(x)?;
    cholesky(y)?;
    if t == 0.0 {
        return Ok(x.clone());
    }
    if t == 1.0 {
        return Ok(y.clone());
    }
    let ex = eig_sym(x)?;
    let x_half = ex.map(f64::sqrt)?;
    let x_inv_half = ex.map(|l| 1.0 / l.sqrt())?;
    let inner = y.congruence(x_inv_half.as_matrix())?;
    let inner_t = spd_power(&inner, t)?;
    Ok(inner_t.congruence(x_half.as_matrix())?)
}

/// Matrix geometric mean `a #_{1/2} b`, the unique positive solution of the
/// Riccati equation `X a⁻¹ X = b`.
pub fn geometric_mean(a: &SymMatrix, b: &SymMatrix) -> Result<SymMatrix> {
    geodesic(a, b, 0.5)
}

/// Contraction certificate for the fixed-point square-root map on `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaBound {
    /// Operator norm `‖A‖₂`.
    pub norm_a: f64,
    pub lambda_min_a: f64,
    /// `(1 + ‖A‖) / (1 + ‖A‖ + 2 min(λ_min(A), 1))`.
    pub gamma: f64,
}

impl GammaBound {
    pub fn from_spectrum(norm_a: f64, lambda_min_a: f64) -> Self {
        let gamma = (1.0 + norm_a) / (1.0 + norm_a + 2.0 * lambda_min_a.min(1.0));
        Self {
            norm_a,
            lambda_min_a,
            gamma,
        }
    }
}

pub fn gamma_bound(a: &SymMatrix) -> Result<GammaBound> {
    let eig = eig_sym(a)?;
    let lambda_min = eig.lambda_min();
    if !(lambda_min > 0.0) {
        return Err(LinalgError::NotPositiveDefinite {
            index: a.n() - 1,
            pivot: lambda_min,
        }
        .into());
    }
    let norm = eig.lambda_max().abs().max(lambda_min.abs());
    Ok(GammaBound::from_spectrum(norm, lambda_min))
}

/// Objective of the geometric square-root problem,
/// `δ_S²(X, A) + δ_S²(X, I)`; minimized at `X = A^{1/2}`.
pub fn sqrt_objective(x: &SymMatrix, a: &SymMatrix) -> Result<f64> {
    let i = SymMatrix::identity(a.n());
    Ok(s_divergence(x, a)? + s_divergence(x, &i)?)
}

/// Residual of the first-order optimality condition
/// `X⁻¹ = (X + A)⁻¹ + (X + I)⁻¹`, relative to `‖X⁻¹‖_F`.
pub fn optimality_residual(x: &SymMatrix, a: &SymMatrix) -> Result<f64> {
    let x_inv = matcore::inverse_spd(x)?;
    let xa_inv = matcore::inverse_spd(&x.add(a)?)?;
    let xi_inv = matcore::inverse_spd(&x.shift(1.0)?)?;
    let r = x_inv.sub(&xa_inv)?.sub(&xi_inv)?;
    Ok(r.frobenius_norm() / x_inv.frobenius_norm())
}
