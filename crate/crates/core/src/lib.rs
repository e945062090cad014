//! Explicit inner-product-space (EIPS) kernels for information theoretic learning.
//!
//! The crate is organised around one idea: a Gaussian kernel replaced by an
//! explicit, finite-dimensional feature map `z(x)` turns every pairwise
//! kernel sum into a product of feature-space means. On top of that:
//!
//! - [`features`]: Taylor, Gauss–Hermite quadrature and random Fourier maps.
//! - [`itl`]: information potential, entropy, cross information potential,
//!   correntropy, correntropy coefficient, QMI and divergences, each with a
//!   direct O(N²) backend, an EIPS backend and an incomplete-Cholesky backend.
//! - [`icd`]: greedy pivoted incomplete Cholesky factorization of Gaussian
//!   Gram matrices.
//! - [`kaf`]: online kernel adaptive filters (constant-cost feature-space
//!   filters and growing-dictionary baselines).
//! - [`data`]: delimited-file loading, normalization, Mackey–Glass series and
//!   time-delay embedding.
//!
//! All kernels are unnormalized Gaussians, `k(0) = 1`.

pub mod data;
pub mod error;
pub mod features;
pub mod icd;
pub mod itl;
pub mod kaf;
pub mod kernel;
pub mod timing;

pub use error::{Error, Result};
pub use features::{FeatureMap, MapSpec};
