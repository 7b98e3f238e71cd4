//! Dense symmetric positive (semi)definite matrix square roots.
//!
//! - [`matcore`]: symmetric matrix type, Cholesky, eigen oracle, norms, Matrix Market I/O.
//! - [`geometry`]: S-divergence, Thompson metric, geodesics on the SPD cone.
//! - [`solvers`]: iterative square-root solvers sharing one configuration and result type.
//! - [`gallery`]: deterministic test-matrix generators.
//! - [`clibench`]: the `psdroot` command-line front end and benchmark harness.

// `!(x > 0.0)` is used on purpose: NaN must fail positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clibench;
pub mod gallery;
pub mod geometry;
pub mod matcore;
pub mod solvers;
