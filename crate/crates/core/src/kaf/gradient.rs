//! Information potential of an error window and its gradients.
//!
//! With `eᵢ = yᵢ - wᵀzᵢ` and `V(w) = (1/L²) Σᵢ Σⱼ G_s(eᵢ - eⱼ)`,
//!
//! ```text
//! ∇V = (1/(s²L²)) Σᵢ Σⱼ G_s(eᵢ - eⱼ)(eᵢ - eⱼ)(zᵢ - zⱼ)
//! ```
//!
//! which points uphill in IP (downhill in error entropy). `zᵢ` is whatever
//! regressor the filter is linear in: input features for the no-trick
//! filters, raw inputs for the linear filter.

use crate::error::{Error, Result};
use crate::features::FeatureMap;
use crate::kernel::gaussian_sq;

/// A full-window IP gradient; `defined` is false when fewer than two errors
/// are available, in which case `value` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IpGradient {
    pub value: Vec<f64>,
    pub defined: bool,
}

fn check(z: &[&[f64]], e: &[f64]) -> Result<usize> {
    if z.len() != e.len() {
        return Err(Error::LengthMismatch {
            left: z.len(),
            right: e.len(),
        });
    }
    let dim = z.first().map_or(0, |r| r.len());
    if let Some(bad) = z.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    Ok(dim)
}

/// `(1/L²) Σᵢ Σⱼ G_s(eᵢ - eⱼ)`.
pub fn window_ip(e: &[f64], width: f64) -> f64 {
    if e.is_empty() {
        return 0.0;
    }
    let mut off = 0.0;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            off += gaussian_sq((e[i] - e[j]).powi(2), width);
        }
    }
    let l = e.len() as f64;
    (l + 2.0 * off) / (l * l)
}

/// Exact gradient by pairwise Gaussian evaluation, O(L² + L·D):
/// the double sum collapses to `2 Σᵢ sᵢ zᵢ` with `sᵢ = Σⱼ G(eᵢ-eⱼ)(eᵢ-eⱼ)`.
pub fn ip_gradient_direct(z: &[&[f64]], e: &[f64], width: f64) -> Result<IpGradient> {
    let dim = check(z, e)?;
    let l = e.len();
    let mut g = vec![0.0; dim];
    if l < 2 {
        return Ok(IpGradient {
            value: g,
            defined: false,
        });
    }
    let mut s = vec![0.0; l];
    for i in 0..l {
        for j in i + 1..l {
            let d = e[i] - e[j];
            let t = gaussian_sq(d * d, width) * d;
            s[i] += t;
            s[j] -= t;
        }
    }
    let c = 2.0 / (width * width * (l * l) as f64);
    for (zi, si) in z.iter().zip(&s) {
        for (gk, zk) in g.iter_mut().zip(zi.iter()) {
            *gk += c * si * zk;
        }
    }
    Ok(IpGradient {
        value: g,
        defined: true,
    })
}

/// Factored gradient with an explicit error map `z_e`, O(L·D·D_e):
///
/// `∇V = (2/(s²L²)) (A b - E c)` with `A = Σ eᵢ zᵢ z_e(eᵢ)ᵀ`,
/// `b = Σ z_e(eⱼ)`, `c = Σ eᵢ z_e(eᵢ)`, `E = Σ zⱼ z_e(eⱼ)ᵀ`, and `s` the
/// width of the error map.
pub fn ip_gradient_eips(z: &[&[f64]], e: &[f64], err_map: &FeatureMap) -> Result<IpGradient> {
    let dim = check(z, e)?;
    if err_map.input_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: err_map.input_dim(),
        });
    }
    let l = e.len();
    let de = err_map.feature_dim();
    let mut g = vec![0.0; dim];
    if l < 2 {
        return Ok(IpGradient {
            value: g,
            defined: false,
        });
    }
    let mut ze = vec![0.0; de];
    let mut b = vec![0.0; de];
    let mut c = vec![0.0; de];
    // A and E share the loop over samples; row-major D × D_e.
    let mut a = vec![0.0; dim * de];
    let mut m = vec![0.0; dim * de];
    for (zi, &ei) in z.iter().zip(e) {
        err_map.map_into(&[ei], &mut ze)?;
        for k in 0..de {
            b[k] += ze[k];
            c[k] += ei * ze[k];
        }
        for (r, &zr) in zi.iter().enumerate() {
            let row_a = &mut a[r * de..(r + 1) * de];
            let row_m = &mut m[r * de..(r + 1) * de];
            for k in 0..de {
                row_m[k] += zr * ze[k];
                row_a[k] += ei * zr * ze[k];
            }
        }
    }
    let s = err_map.sigma();
    let scale = 2.0 / (s * s * (l * l) as f64);
    for (r, gr) in g.iter_mut().enumerate() {
        let row_a = &a[r * de..(r + 1) * de];
        let row_m = &m[r * de..(r + 1) * de];
        let mut acc = 0.0;
        for k in 0..de {
            acc += row_a[k] * b[k] - row_m[k] * c[k];
        }
        *gr = scale * acc;
    }
    Ok(IpGradient {
        value: g,
        defined: true,
    })
}

/// Stochastic information gradient over a trailing window:
/// `(1/(s²L)) Σᵢ G_s(eₙ - eᵢ)(eₙ - eᵢ)(zₙ - zᵢ)`. Zero for an empty window.
pub fn sig_gradient(z_n: &[f64], e_n: f64, z: &[&[f64]], e: &[f64], width: f64) -> Result<Vec<f64>> {
    check(z, e)?;
    let mut g = vec![0.0; z_n.len()];
    if e.is_empty() {
        return Ok(g);
    }
    let scale = 1.0 / (width * width * e.len() as f64);
    for (zi, &ei) in z.iter().zip(e) {
        if zi.len() != z_n.len() {
            return Err(Error::DimensionMismatch {
                expected: z_n.len(),
                got: zi.len(),
            });
        }
        let d = e_n - ei;
        let t = scale * sig_weight(d, width);
        for ((gk, a), b) in g.iter_mut().zip(z_n).zip(zi.iter()) {
            *gk += t * (a - b);
        }
    }
    Ok(g)
}

/// `G_s(d)·d`, the per-pair SIG weight.
#[inline]
pub fn sig_weight(d: f64, width: f64) -> f64 {
    gaussian_sq(d * d, width) * d
}
