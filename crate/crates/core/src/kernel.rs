//! Unnormalized Gaussian kernel helpers.

use ndarray::ArrayView1;

/// `exp(-‖a-b‖² / 2σ²)`.
#[inline]
pub fn gaussian(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    gaussian_sq(sq_dist(a, b), sigma)
}

/// Gaussian kernel evaluated from a squared distance.
#[inline]
pub fn gaussian_sq(sq: f64, sigma: f64) -> f64 {
    (-sq / (2.0 * sigma * sigma)).exp()
}

#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn sq_dist_view(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
