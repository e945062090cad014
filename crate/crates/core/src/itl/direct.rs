//! Pairwise kernel sums, O(N²) time and O(1) extra space.

use super::stats::QmiTerms;
use super::Points;
use crate::kernel::{gaussian_sq, sq_dist};

/// `Σᵢ Σⱼ k(aᵢ - bⱼ)`.
pub fn cross_sum(a: &Points, b: &Points, sigma: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..a.n() {
        let ai = a.row(i);
        for j in 0..b.n() {
            total += gaussian_sq(sq_dist(ai, b.row(j)), sigma);
        }
    }
    total
}

/// `Σᵢ Σⱼ k(aᵢ - aⱼ)`, using symmetry.
pub fn self_sum(a: &Points, sigma: f64) -> f64 {
    let mut off = 0.0;
    for i in 0..a.n() {
        let ai = a.row(i);
        for j in i + 1..a.n() {
            off += gaussian_sq(sq_dist(ai, a.row(j)), sigma);
        }
    }
    a.n() as f64 + 2.0 * off
}

pub fn information_potential(a: &Points, sigma: f64) -> f64 {
    let n = a.n() as f64;
    self_sum(a, sigma) / (n * n)
}

pub fn cross_information_potential(a: &Points, b: &Points, sigma: f64) -> f64 {
    cross_sum(a, b, sigma) / (a.n() as f64 * b.n() as f64)
}

/// `(1/N) Σᵢ k(xᵢ - yᵢ)`.
pub fn correntropy(x: &Points, y: &Points, sigma: f64) -> f64 {
    let s: f64 = (0..x.n())
        .map(|i| gaussian_sq(sq_dist(x.row(i), y.row(i)), sigma))
        .sum();
    s / x.n() as f64
}

pub fn correntropy_terms(x: &Points, y: &Points, sigma: f64) -> (f64, f64, f64, f64) {
    (
        correntropy(x, y, sigma),
        cross_information_potential(x, y, sigma),
        information_potential(x, sigma),
        information_potential(y, sigma),
    )
}

/// V_J, V_M and V_C in one pass over all index pairs. The triple sum of V_C
/// is evaluated as `(1/N³) Σᵢ (Σⱼ kx_ij)(Σₖ ky_ik)`.
pub fn qmi_terms(x: &Points, y: &Points, sigma: f64) -> QmiTerms {
    let n = x.n();
    let mut row_x = vec![0.0; n];
    let mut row_y = vec![0.0; n];
    let mut joint_off = 0.0;
    for i in 0..n {
        row_x[i] += 1.0;
        row_y[i] += 1.0;
        let (xi, yi) = (x.row(i), y.row(i));
        for j in i + 1..n {
            let kx = gaussian_sq(sq_dist(xi, x.row(j)), sigma);
            let ky = gaussian_sq(sq_dist(yi, y.row(j)), sigma);
            row_x[i] += kx;
            row_x[j] += kx;
            row_y[i] += ky;
            row_y[j] += ky;
            joint_off += kx * ky;
        }
    }
    let nf = n as f64;
    let vj = (nf + 2.0 * joint_off) / (nf * nf);
    let ipx = row_x.iter().sum::<f64>() / (nf * nf);
    let ipy = row_y.iter().sum::<f64>() / (nf * nf);
    let vc = row_x.iter().zip(&row_y).map(|(a, b)| a * b).sum::<f64>() / (nf * nf * nf);
    QmiTerms {
        vj,
        vm: ipx * ipy,
        vc,
    }
}
