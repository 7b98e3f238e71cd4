//! Deterministic test-matrix generators.
//!
//! Randomized kinds draw from `Xoshiro256++` seeded through SplitMix64
//! (`rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64`); normal variates use
//! the `rand_distr` ziggurat sampler. Both are portable, so a given seed
//! yields the same matrix on every platform.

mod randcorr;
mod spec;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::matcore::{eig_sym, LinalgError, SymMatrix};

pub use randcorr::randcorr;
pub use spec::MatrixSpec;

/// Spiked-identity `β` giving `κ = 64`.
pub const DEFAULT_SPIKE_BETA: f64 = 63.0;

/// Largest integer below which every `f64` integer is exact.
const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GalleryError {
    #[error("bad matrix spec `{spec}`: {msg} (at `{token}`)")]
    Parse {
        spec: String,
        token: String,
        msg: String,
    },
    #[error("invalid matrix parameters: {0}")]
    Invalid(String),
    #[error("inverse Hilbert entries overflow f64 for n = {0}")]
    Overflow(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, GalleryError>;

pub(crate) fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub(crate) fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Xoshiro256PlusPlus) -> DMatrix<f64> {
    // Filled column by column so the draw order is fixed.
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = StandardNormal.sample(rng);
        }
    }
    m
}

/// Orthonormal basis of the column space of a full-rank `m` (thin QR with
/// the signs of `R`'s diagonal made positive).
pub(crate) fn orthonormal_columns(m: DMatrix<f64>) -> DMatrix<f64> {
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(GalleryError::Invalid("dimension must be at least 1".into()));
    }
    Ok(())
}

fn check_rank(n: usize, r: usize) -> Result<()> {
    check_dim(n)?;
    if r == 0 || r > n {
        return Err(GalleryError::Invalid(format!("rank {r} must lie in 1..={n}")));
    }
    Ok(())
}

/// `H[i][j] = 1/(i + j − 1)`, 1-based.
pub fn hilbert(n: usize) -> Result<SymMatrix> {
    check_dim(n)?;
    Ok(SymMatrix::from_fn(n, |i, j| 1.0 / (i + j + 1) as f64)?)
}

fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // Exact at every step: acc·(n−i) is divisible by (i+1).
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exact inverse of the Hilbert matrix.
#[derive(Debug, Clone)]
pub struct InverseHilbert {
    pub matrix: SymMatrix,
    /// False once some entry exceeds 2⁵³ and is rounded.
    pub exact: bool,
}

/// Inverse Hilbert matrix from the closed form
/// `(−1)^{i+j}(i+j−1)·C(n+i−1, n−j)·C(n+j−1, n−i)·C(i+j−2, i−1)²` (1-based),
/// evaluated in big integers and rounded once to `f64`.
///
/// Entries overflow `f64` shortly after `n = 200`.
pub fn inv_hilbert(n: usize) -> Result<InverseHilbert> {
    check_dim(n)?;
    let nn = n as u64;
    let mut m = DMatrix::zeros(n, n);
    let mut exact = true;
    for i in 1..=nn {
        for j in i..=nn {
            let c = binomial_big(i + j - 2, i - 1);
            let mag = BigUint::from(i + j - 1)
                * binomial_big(nn + i - 1, nn - j)
                * binomial_big(nn + j - 1, nn - i)
                * &c
                * &c;
            let v = mag.to_f64().unwrap_or(f64::INFINITY);
            if !v.is_finite() {
                return Err(GalleryError::Overflow(n));
            }
            if v > EXACT_INT_LIMIT {
                exact = false;
            }
            let v = if (i + j) % 2 == 0 { v } else { -v };
            let (r, c) = ((i - 1) as usize, (j - 1) as usize);
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
    Ok(InverseHilbert {
        matrix: SymMatrix::new(m)?,
        exact,
    })
}

/// `I + β·UUᵀ` with `U` an `n×r` matrix with orthonormal columns, so the
/// spectrum is `{1, 1 + β}`.
pub fn spiked_identity(n: usize, r: usize, beta: f64, seed: u64) -> Result<SymMatrix> {
    check_rank(n, r)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(GalleryError::Invalid(format!("beta must be positive, got {beta}")));
    }
    let mut rng = rng(seed);
    let u = orthonormal_columns(gaussian_matrix(n, r, &mut rng));
    let mut m = &u * u.transpose() * beta;
    for i in 0..n {
        m[(i, i)] += 1.0;
    }
    Ok(SymMatrix::new(m)?)
}

/// `B·Bᵀ` for an explicit factor.
pub fn gram(b: &DMatrix<f64>) -> Result<SymMatrix> {
    Ok(SymMatrix::new(b * b.transpose())?)
}

/// Rank-`r` covariance `B·Bᵀ` with `B` an `n×r` standard normal matrix.
pub fn lowrank_psd(n: usize, r: usize, seed: u64) -> Result<SymMatrix> {
    check_rank(n, r)?;
    let mut rng = rng(seed);
    gram(&gaussian_matrix(n, r, &mut rng))
}

/// Builds the matrix a spec describes.
pub fn generate(spec: &MatrixSpec) -> Result<SymMatrix> {
    match *spec {
        MatrixSpec::Hilbert { n } => hilbert(n),
        MatrixSpec::InvHilbert { n } => Ok(inv_hilbert(n)?.matrix),
        MatrixSpec::RandCorr { n, seed } => randcorr(n, seed),
        MatrixSpec::Spiked { n, r, beta, seed } => spiked_identity(n, r, beta, seed),
        MatrixSpec::LowRank { n, r, seed } => lowrank_psd(n, r, seed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// `λ_max/λ_min`, or `+∞` when `λ_min ≤ 1e-300`.
    pub kappa: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// `λ_min ≤ n·u·λ_max`: the reported κ exceeds what double precision
    /// can resolve and is indicative only.
    pub saturated: bool,
}

pub fn condition_report(a: &SymMatrix) -> Result<ConditionReport> {
    let eig = eig_sym(a)?;
    let (lambda_max, lambda_min) = (eig.lambda_max(), eig.lambda_min());
    let kappa = if lambda_min <= 1e-300 {
        f64::INFINITY
    } else {
        lambda_max / lambda_min
    };
    let saturated = lambda_min <= a.n() as f64 * f64::EPSILON * lambda_max;
    Ok(ConditionReport {
        kappa,
        lambda_max,
        lambda_min,
        saturated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{numerical_rank, DEFAULT_RANK_TOL};
    use crate::matcore::frobenius;

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert(1).unwrap().get(0, 0), 1.0);
        let h = hilbert(2).unwrap();
        assert_eq!(h.as_matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0 / 3.0]));
        assert!(hilbert(0).is_err());
    }

    #[test]
    fn hilbert_fifty_is_numerically_singular() {
        let rep = condition_report(&hilbert(50).unwrap()).unwrap();
        assert!(rep.saturated);
        assert!(rep.kappa > 1e16 || rep.kappa.is_infinite() || rep.kappa < 0.0);
    }

    #[test]
    fn inv_hilbert_examples() {
        let one = inv_hilbert(1).unwrap();
        assert_eq!(one.matrix.get(0, 0), 1.0);
        let three = inv_hilbert(3).unwrap();
        assert!(three.exact);
        let expected = [9.0, -36.0, 30.0, -36.0, 192.0, -180.0, 30.0, -180.0, 180.0];
        assert_eq!(three.matrix.as_matrix(), &DMatrix::from_row_slice(3, 3, &expected));
        assert!(inv_hilbert(12).unwrap().exact);
        assert!(!inv_hilbert(13).unwrap().exact);
        assert!(matches!(inv_hilbert(210), Err(GalleryError::Overflow(210))));
    }

    #[test]
    fn inv_hilbert_hundred_is_representable() {
        let ih = inv_hilbert(100).unwrap();
        assert!(!ih.exact);
        let max = ih.matrix.max_abs();
        assert!(max > 1e149 && max < 1e150, "{max:e}");
        let rep = condition_report(&ih.matrix).unwrap();
        assert!(rep.saturated);
    }

    #[test]
    fn hilbert_pairs_are_inverses() {
        // Round-off in the rational Hilbert entries is amplified by κ(H);
        // the n²·1e-9 bound holds through n = 7.
        for n in 1..=7 {
            let h = hilbert(n).unwrap();
            let hi = inv_hilbert(n).unwrap().matrix;
            let prod = h.as_matrix() * hi.as_matrix() - DMatrix::identity(n, n);
            assert!(frobenius(&prod) <= (n * n) as f64 * 1e-9, "n = {n}");
        }
    }

    #[test]
    fn spiked_spectrum() {
        let a = spiked_identity(50, 5, DEFAULT_SPIKE_BETA, 42).unwrap();
        let e = eig_sym(&a).unwrap();
        for (k, l) in e.eigenvalues.iter().enumerate() {
            let want = if k < 5 { 64.0 } else { 1.0 };
            assert!((l - want).abs() <= 1e-12 * want, "λ_{k} = {l}");
        }
        let rep = condition_report(&a).unwrap();
        assert!((rep.kappa - 64.0).abs() < 1e-10);
        assert!(!rep.saturated);

        let full = spiked_identity(4, 4, 2.0, 7).unwrap();
        assert!(full.distance(&SymMatrix::scaled_identity(4, 3.0)) < 1e-14);
        assert!(spiked_identity(4, 5, 1.0, 0).is_err());
        assert!(spiked_identity(4, 2, 0.0, 0).is_err());
    }

    #[test]
    fn lowrank_rank() {
        let a = lowrank_psd(50, 5, 3).unwrap();
        let e = eig_sym(&a).unwrap();
        assert_eq!(numerical_rank(&e.eigenvalues, DEFAULT_RANK_TOL), 5);
        let id = gram(&DMatrix::identity(6, 6)).unwrap();
        assert_eq!(id, SymMatrix::identity(6));
        assert!(lowrank_psd(3, 0, 1).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        for s in ["randcorr:12:5", "spiked:10:3:63:42", "lowrank:9:2:1", "hilb:4", "invhilb:4"] {
            let spec: MatrixSpec = s.parse().unwrap();
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert!(a.as_matrix().iter().zip(b.as_matrix().iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        let a = lowrank_psd(5, 2, 1).unwrap();
        let b = lowrank_psd(5, 2, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn condition_examples() {
        assert_eq!(condition_report(&SymMatrix::identity(3)).unwrap().kappa, 1.0);
        let d = SymMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        assert_eq!(condition_report(&d).unwrap().kappa, 4.0);
        let rep = condition_report(&hilbert(6).unwrap()).unwrap();
        assert!((rep.kappa / 1.495e7 - 1.0).abs() < 1e-3, "{}", rep.kappa);
        let z = condition_report(&SymMatrix::zeros(2)).unwrap();
        assert!(z.kappa.is_infinite() && z.saturated);
    }
}
