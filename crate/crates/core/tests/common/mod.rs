//! Shared fixtures for the integration tests: seeded random matrices and
//! an eigendecomposition-free reference for small cases.
#![allow(dead_code)]

use nalgebra::DMatrix;
use psdroot::matcore::SymMatrix;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type TestRng = Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut TestRng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
pub fn orthogonal(rng: &mut TestRng, n: usize) -> DMatrix<f64> {
    let qr = gaussian(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `Q diag(λ) Qᵀ` with `Q` orthogonal.
pub fn with_spectrum(rng: &mut TestRng, eigenvalues: &[f64]) -> SymMatrix {
    let n = eigenvalues.len();
    let q = orthogonal(rng, n);
    let mut scaled = q.clone();
    for (j, l) in eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*l);
    }
    SymMatrix::new(scaled * q.transpose()).unwrap()
}

/// Positive definite matrix with eigenvalues log-uniform in
/// `[κ^{-1/2}, κ^{1/2}]`, both extremes attained.
pub fn random_pd(rng: &mut TestRng, n: usize, kappa: f64) -> SymMatrix {
    let half = kappa.sqrt().ln();
    let mut lam: Vec<f64> = (0..n).map(|_| (rng.random_range(-half..=half)).exp()).collect();
    lam[0] = kappa.sqrt();
    if n > 1 {
        lam[1] = 1.0 / kappa.sqrt();
    }
    with_spectrum(rng, &lam)
}

/// Random symmetric matrix with standard normal entries.
pub fn random_sym(rng: &mut TestRng, n: usize) -> SymMatrix {
    let g = gaussian(rng, n, n);
    SymMatrix::new((&g + g.transpose()) * 0.5).unwrap()
}

pub fn rel_dist(x: &SymMatrix, y: &SymMatrix) -> f64 {
    x.distance(y) / y.frobenius_norm()
}
