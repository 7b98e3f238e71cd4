//! Dense symmetric matrices and the linear-algebra primitives the solvers
//! and the geometry layer are built on.
//!
//! All matrices are stored as full square column-major `DMatrix<f64>`.
//! [`SymMatrix`] symmetrizes on ingest via `(M + Mᵀ)/2`, so entries `(i, j)`
//! and `(j, i)` are bit-identical (floating-point addition is commutative).
//!
//! The symmetric eigendecomposition is the single ground truth for spectral
//! quantities: operator norms, extreme eigenvalues, condition numbers and the
//! reference square root [`sqrt_eig`].

pub mod io;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

/// Relative tolerance separating PD from PSD: `λ_min ≥ 1e-12·max(1, λ_max)`.
pub const DEFINITENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is indefinite (lambda_min = {lambda_min:e}, lambda_max = {lambda_max:e})")]
    IndefiniteInput { lambda_min: f64, lambda_max: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must have at least one row")]
    Empty,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("symmetric eigenvalue iteration did not converge")]
    ConvergenceFailure,
    #[error("matrix is numerically singular")]
    Singular,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense real symmetric matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

/// `(M + Mᵀ) / 2`.
pub fn symmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

impl SymMatrix {
    /// Symmetrizes `m` and validates it.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(LinalgError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(LinalgError::Empty);
        }
        let data = symmetric_part(&m);
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: k % rows,
                col: k / rows,
            });
        }
        Ok(Self { data })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    /// Row-major entries of an `n×n` matrix.
    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                left: n * n,
                right: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        Self::from_fn(n, |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn zeros(n: usize) -> Self {
        Self::scaled_identity(n, 0.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        assert!(n >= 1, "dimension must be positive");
        Self {
            data: DMatrix::from_diagonal_element(n, n, s),
        }
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.data.diagonal().iter().copied().collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(LinalgError::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::new(&self.data + &other.data)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::new(&self.data - &other.data)
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        Self::new(&self.data * s)
    }

    /// `self + s·I`.
    pub fn shift(&self, s: f64) -> Result<Self> {
        let mut m = self.data.clone();
        for i in 0..self.n() {
            m[(i, i)] += s;
        }
        Self::new(m)
    }

    /// `self²`, symmetrized.
    pub fn square(&self) -> Result<Self> {
        Self::new(&self.data * &self.data)
    }

    /// `B·self·Bᵀ` for a general square `B`, symmetrized.
    pub fn congruence(&self, b: &DMatrix<f64>) -> Result<Self> {
        Self::new(b * &self.data * b.transpose())
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        frobenius(&(&self.data - &other.data))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Overflow-safe Frobenius norm of a general matrix.
pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = m.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * sum.sqrt()
}

/// Maximum absolute column sum.
pub fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum absolute row sum.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Cholesky factorization `A = RᵀR` with `R` upper triangular.
#[derive(Debug, Clone)]
pub struct Cholesky {
    r: DMatrix<f64>,
}

/// Factors a positive definite matrix as `A = RᵀR`.
///
/// Fails with [`LinalgError::NotPositiveDefinite`] on the first pivot that is
/// not strictly positive.
pub fn cholesky(a: &SymMatrix) -> Result<Cholesky> {
    let n = a.n();
    let m = a.as_matrix();
    let mut r = DMatrix::<f64>::zeros(n, n);
    // Column-oriented: R[.., j] is contiguous, so R[k, j] needs the dot
    // product of the leading parts of columns k and j.
    for j in 0..n {
        for k in 0..j {
            let dot = {
                let ck = r.column(k);
                let cj = r.column(j);
                let mut s = 0.0;
                for i in 0..k {
                    s += ck[i] * cj[i];
                }
                s
            };
            r[(k, j)] = (m[(k, j)] - dot) / r[(k, k)];
        }
        let cj = r.column(j);
        let mut s = 0.0;
        for i in 0..j {
            s += cj[i] * cj[i];
        }
        let pivot = m[(j, j)] - s;
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(LinalgError::NotPositiveDefinite { index: j, pivot });
        }
        r[(j, j)] = pivot.sqrt();
    }
    Ok(Cholesky { r })
}

impl Cholesky {
    /// Upper-triangular `R` with `A = RᵀR`.
    pub fn upper(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// Lower-triangular `L = Rᵀ` with `A = LLᵀ`.
    pub fn lower(&self) -> DMatrix<f64> {
        self.r.transpose()
    }

    pub fn n(&self) -> usize {
        self.r.nrows()
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if b.nrows() != self.n() {
            return Err(LinalgError::DimensionMismatch {
                left: self.n(),
                right: b.nrows(),
            });
        }
        let mut x = b.clone();
        self.solve_mut(&mut x);
        Ok(x)
    }

    fn solve_mut(&self, x: &mut DMatrix<f64>) {
        // Pivots are strictly positive, so neither triangular solve can fail.
        let ok = self.r.tr_solve_upper_triangular_mut(x) && self.r.solve_upper_triangular_mut(x);
        debug_assert!(ok);
    }

    /// Solves `Rᵀ Y = B` (whitening by the lower factor).
    pub fn solve_lower(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = b.clone();
        let ok = self.r.tr_solve_upper_triangular_mut(&mut y);
        debug_assert!(ok);
        y
    }

    /// `R⁻¹`, upper triangular, by column-oriented back substitution.
    pub fn upper_inverse(&self) -> DMatrix<f64> {
        let n = self.n();
        let r = &self.r;
        let mut w = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            // Column j of R⁻¹ solves R w = e_j and vanishes below row j.
            let mut wc = w.column_mut(j);
            wc[j] = 1.0;
            for k in (0..=j).rev() {
                wc[k] /= r[(k, k)];
                let wk = wc[k];
                let rc = r.column(k);
                for i in 0..k {
                    wc[i] -= rc[i] * wk;
                }
            }
        }
        w
    }

    /// `A⁻¹ = R⁻¹R⁻ᵀ`, symmetrized.
    pub fn inverse(&self) -> Result<SymMatrix> {
        let w = self.upper_inverse();
        SymMatrix::new(&w * w.transpose())
    }

    /// `log det A = 2 Σ log R_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.r.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }
}

/// Solves `A X = B` through a Cholesky factorization of `A`.
pub fn solve_spd(a: &SymMatrix, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    cholesky(a)?.solve(b)
}

/// `A⁻¹` for positive definite `A`.
pub fn inverse_spd(a: &SymMatrix) -> Result<SymMatrix> {
    cholesky(a)?.inverse()
}

/// Spectral decomposition `A = Q Λ Qᵀ`, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct EigDecomp {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: DMatrix<f64>,
}

impl EigDecomp {
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `Q f(Λ) Qᵀ`, symmetrized.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let v = f(lam);
            scaled.column_mut(j).scale_mut(v);
        }
        SymMatrix::new(scaled * q.transpose())
    }
}

/// Symmetric eigendecomposition.
///
/// The input is pre-scaled by a power of two so that matrices with huge
/// entries (inverse Hilbert) do not overflow during tridiagonalization.
pub fn eig_sym(a: &SymMatrix) -> Result<EigDecomp> {
    let n = a.n();
    let max = a.max_abs();
    let scale = if max > 0.0 {
        2f64.powi(max.log2().round() as i32)
    } else {
        1.0
    };
    let scaled = a.as_matrix() / scale;
    let eig = SymmetricEigen::try_new(scaled, f64::EPSILON, 1000 * n.max(1))
        .ok_or(LinalgError::ConvergenceFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i] * scale).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigDecomp {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, sorted descending. Cheaper than [`eig_sym`].
pub fn eigenvalues_sym(a: &SymMatrix) -> Vec<f64> {
    let max = a.max_abs();
    let scale = if max > 0.0 {
        2f64.powi(max.log2().round() as i32)
    } else {
        1.0
    };
    let scaled = a.as_matrix() / scale;
    let mut ev: Vec<f64> = scaled.symmetric_eigenvalues().iter().map(|l| l * scale).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Principal square root via the eigendecomposition. Reference oracle for
/// every iterative solver.
///
/// Eigenvalues in `[-1e-12·max(1, λ_max), 0)` are clamped to zero; anything
/// more negative is rejected.
pub fn sqrt_eig(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = eig_sym(a)?;
    let lambda_max = eig.lambda_max();
    let lambda_min = eig.lambda_min();
    if lambda_min < -DEFINITENESS_TOL * lambda_max.abs().max(1.0) {
        return Err(LinalgError::IndefiniteInput {
            lambda_min,
            lambda_max,
        });
    }
    eig.map(|l| l.max(0.0).sqrt())
}

/// `A^p` for positive definite `A`, via the eigendecomposition.
pub fn spd_power(a: &SymMatrix, p: f64) -> Result<SymMatrix> {
    let eig = eig_sym(a)?;
    if !(eig.lambda_min() > 0.0) {
        return Err(LinalgError::NotPositiveDefinite {
            index: a.n() - 1,
            pivot: eig.lambda_min(),
        });
    }
    eig.map(|l| l.powf(p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub frobenius: f64,
    pub operator2: f64,
    pub one: f64,
    pub inf: f64,
}

pub fn norms(a: &SymMatrix) -> Result<Norms> {
    let eig = eig_sym(a)?;
    Ok(Norms {
        frobenius: a.frobenius_norm(),
        operator2: eig.lambda_max().abs().max(eig.lambda_min().abs()),
        one: one_norm(a.as_matrix()),
        inf: inf_norm(a.as_matrix()),
    })
}

/// Spectral norm `max |λ_i|`.
pub fn operator_norm(a: &SymMatrix) -> Result<f64> {
    let eig = eig_sym(a)?;
    Ok(eig.lambda_max().abs().max(eig.lambda_min().abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DefinitenessClass {
    PositiveDefinite { lambda_min: f64 },
    PositiveSemidefinite { lambda_min: f64 },
    Indefinite { lambda_min: f64 },
}

impl DefinitenessClass {
    pub fn lambda_min(&self) -> f64 {
        match *self {
            Self::PositiveDefinite { lambda_min }
            | Self::PositiveSemidefinite { lambda_min }
            | Self::Indefinite { lambda_min } => lambda_min,
        }
    }

    pub fn is_pd(&self) -> bool {
        matches!(self, Self::PositiveDefinite { .. })
    }

    pub fn is_psd(&self) -> bool {
        !matches!(self, Self::Indefinite { .. })
    }
}

pub fn classify(a: &SymMatrix) -> Result<DefinitenessClass> {
    let eig = eig_sym(a)?;
    let lambda_min = eig.lambda_min();
    let tol = DEFINITENESS_TOL * eig.lambda_max().max(1.0);
    Ok(if lambda_min >= tol {
        DefinitenessClass::PositiveDefinite { lambda_min }
    } else if lambda_min >= -tol {
        DefinitenessClass::PositiveSemidefinite { lambda_min }
    } else {
        DefinitenessClass::Indefinite { lambda_min }
    })
}

/// Loewner-order interval test `lo ⪯ x ⪯ hi` up to `tol` on the eigenvalues
/// of the differences.
pub fn in_psd_interval(x: &SymMatrix, lo: &SymMatrix, hi: &SymMatrix, tol: f64) -> Result<bool> {
    let above = eig_sym(&x.sub(lo)?)?.lambda_min();
    let below = eig_sym(&hi.sub(x)?)?.lambda_min();
    Ok(above >= -tol && below >= -tol)
}
