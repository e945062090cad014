use super::{FeatureMap, MapParams};
use crate::error::{Error, Result};

/// Default hard cap on the number of Taylor features.
pub const DEFAULT_FEATURE_CAP: usize = 1_000_000;

/// `C(d + r, r)`, or `None` on overflow.
pub fn taylor_feature_count(input_dim: usize, degree: u32) -> Option<u128> {
    let d = input_dim as u128;
    let mut c: u128 = 1;
    for k in 1..=degree as u128 {
        // C(d+k, k) = C(d+k-1, k-1) * (d+k) / k, exact at every step.
        c = c.checked_mul(d + k)? / k;
    }
    Some(c)
}

/// Smallest degree `r` with `e / (r+1)! < eps`: the Taylor degree that keeps
/// the truncation error of `exp(t)` on `[-1, 1]` below `eps`.
///
/// # Panics
///
/// If `eps` is not a positive finite number.
pub fn taylor_required_degree(eps: f64) -> u32 {
    assert!(
        eps > 0.0 && eps.is_finite(),
        "tolerance must be positive and finite, got {eps}"
    );
    let mut r = 0u32;
    // bound = e / (r+1)!
    let mut bound = std::f64::consts::E;
    while bound >= eps {
        r += 1;
        bound /= (r + 1) as f64;
    }
    r
}

/// Multi-indices with `|α| ≤ degree`, degree-major, then descending
/// lexicographic within a degree (`x₁ⁿ` first).
pub(super) fn exponent_table(input_dim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn fill(pos: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = remaining;
            out.push(cur.clone());
            return;
        }
        for k in (0..=remaining).rev() {
            cur[pos] = k;
            fill(pos + 1, remaining - k, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; input_dim];
    for n in 0..=degree {
        fill(0, n, &mut cur, &mut out);
    }
    out
}

pub(super) fn build(input_dim: usize, degree: u32, sigma: f64, cap: usize) -> Result<FeatureMap> {
    if input_dim == 0 {
        return Err(Error::invalid("input dimension must be at least 1"));
    }
    match taylor_feature_count(input_dim, degree) {
        None => {
            return Err(Error::FeatureCap {
                requested: format!("C({}+{degree}, {degree}) (overflow)", input_dim),
                cap,
            })
        }
        Some(n) if n > cap as u128 => {
            return Err(Error::FeatureCap {
                requested: n.to_string(),
                cap,
            })
        }
        Some(_) => {}
    }
    let exponents = exponent_table(input_dim, degree);
    FeatureMap::from_parts(input_dim, sigma, None, MapParams::Taylor { degree, exponents })
}

/// `z_α(x) = exp(-‖x‖²/2σ²) ∏ᵢ (xᵢ/σ)^{αᵢ} / √(αᵢ!)`.
///
/// This equals `exp(-‖x‖²/2σ²) √(m(α)/(σ^{2n} n!)) x^α` with the multinomial
/// count `m(α) = n!/∏αᵢ!`, so grouping the `dⁿ` ordered products into one
/// feature per monomial leaves all inner products unchanged.
pub(super) fn eval(x: &[f64], sigma: f64, degree: usize, exponents: &[u32], out: &mut [f64]) {
    let d = x.len();
    let stride = degree + 1;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let envelope = (-sq / (2.0 * sigma * sigma)).exp();
    // table[i * stride + k] = (xᵢ/σ)^k / √(k!)
    let mut table = vec![0.0; d * stride];
    for (i, &xi) in x.iter().enumerate() {
        let u = xi / sigma;
        let row = &mut table[i * stride..(i + 1) * stride];
        row[0] = 1.0;
        for k in 1..stride {
            row[k] = row[k - 1] * u / (k as f64).sqrt();
        }
    }
    for (f, alpha) in out.iter_mut().zip(exponents.chunks_exact(d)) {
        let mut v = envelope;
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0 {
                v *= table[i * stride + a as usize];
            }
        }
        *f = v;
    }
}
