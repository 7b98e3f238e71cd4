//! Random correlation matrices with a random spectrum.
//!
//! 1. Draw `n` eigenvalues uniformly from `(0, 1)` and rescale them to sum
//!    to `n`.
//! 2. Form `QΛQᵀ` with `Q` Haar-orthogonal (QR of a Gaussian matrix).
//! 3. Drive the diagonal to one with plane rotations: for a pair `i, j` with
//!    `a_ii < 1 < a_jj`, the rotation with `t = s/c` solving
//!    `(a_jj − 1)t² − 2a_ij t + (a_ii − 1) = 0` sets the new `a_ii` to 1.
//!    Rotations preserve the spectrum and the trace, so after `n − 1` of
//!    them the last diagonal entry is 1 up to round-off.

use nalgebra::DMatrix;
use rand::Rng;

use super::{check_dim, gaussian_matrix, orthonormal_columns, rng, Result};
use crate::matcore::SymMatrix;

/// Applies `M ← GᵀMG` where `G` rotates the `(i, j)` plane with
/// `G e_i = c e_i − s e_j`, `G e_j = s e_i + c e_j`.
fn rotate(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    let n = m.nrows();
    for k in 0..n {
        let (mi, mj) = (m[(k, i)], m[(k, j)]);
        m[(k, i)] = c * mi - s * mj;
        m[(k, j)] = s * mi + c * mj;
    }
    for k in 0..n {
        let (mi, mj) = (m[(i, k)], m[(j, k)]);
        m[(i, k)] = c * mi - s * mj;
        m[(j, k)] = s * mi + c * mj;
    }
}

fn unit_diagonal(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let tol = 64.0 * f64::EPSILON;
    for _ in 0..n {
        let below = (0..n).find(|&k| m[(k, k)] < 1.0 - tol);
        let above = (0..n).find(|&k| m[(k, k)] > 1.0 + tol);
        let (Some(i), Some(j)) = (below, above) else {
            break;
        };
        let (aii, ajj, aij) = (m[(i, i)], m[(j, j)], m[(i, j)]);
        let disc = aij * aij - (aii - 1.0) * (ajj - 1.0);
        let q = aij + disc.sqrt().copysign(if aij == 0.0 { 1.0 } else { aij });
        let t = (aii - 1.0) / q;
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = c * t;
        rotate(m, i, j, c, s);
        m[(i, i)] = 1.0;
    }
    for k in 0..n {
        m[(k, k)] = 1.0;
    }
}

/// Random `n×n` correlation matrix: symmetric PSD with unit diagonal.
pub fn randcorr(n: usize, seed: u64) -> Result<SymMatrix> {
    check_dim(n)?;
    let mut rng = rng(seed);
    let mut lambda: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let total: f64 = lambda.iter().sum();
    for l in &mut lambda {
        *l *= n as f64 / total;
    }
    let q = orthonormal_columns(gaussian_matrix(n, n, &mut rng));
    let mut scaled = q.clone();
    for (j, l) in lambda.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*l);
    }
    let mut m = crate::matcore::symmetric_part(&(scaled * q.transpose()));
    unit_diagonal(&mut m);
    Ok(SymMatrix::new(m)?)
}
