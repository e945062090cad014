use super::{FeatureMap, MapParams};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest 1-D rule we attempt; beyond this the Jacobi eigenproblem is both
/// slow and pointless (weights underflow long before).
const MAX_NODES: usize = 1024;

/// A 1-D Gauss–Hermite rule for `∫ f(t) e^{-t²} dt ≈ Σ wᵢ f(tᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermiteRule {
    /// Ascending nodes.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-node Gauss–Hermite rule (physicists' weight `e^{-t²}`) via the
/// Golub–Welsch eigen-decomposition of the symmetric tridiagonal Jacobi
/// matrix. Exact for polynomials of degree ≤ `2n - 1`.
pub fn gauss_hermite(n: usize) -> Result<GaussHermiteRule> {
    if n == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    if n > MAX_NODES {
        return Err(Error::Numerical(format!(
            "Gauss–Hermite rule with {n} nodes exceeds the supported {MAX_NODES}"
        )));
    }
    // Monic Hermite recurrence: p_{k+1} = t p_k - (k/2) p_{k-1}.
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let eig = jacobi
        .try_symmetric_eigen(f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| {
            Error::Numerical(format!("Jacobi eigen-decomposition did not converge for n = {n}"))
        })?;
    let mu0 = std::f64::consts::PI.sqrt();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], mu0 * v0 * v0)
        })
        .collect();
    if pairs.iter().any(|(t, w)| !t.is_finite() || !w.is_finite()) {
        return Err(Error::Numerical(format!("non-finite Gauss–Hermite rule for n = {n}")));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Exact symmetry about 0.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let t = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-t, w);
        pairs[j] = (t, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    Ok(GaussHermiteRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Nodes per dimension for a rule exact up to `2·⌈(degree+1)/2⌉ - 1`.
pub(super) fn nodes_for_degree(degree: u32) -> usize {
    (degree as usize + 2) / 2
}

pub(super) fn build(
    input_dim: usize,
    degree: u32,
    features: usize,
    sigma: f64,
    seed: u64,
) -> Result<FeatureMap> {
    if degree == 0 {
        return Err(Error::invalid("quadrature degree must be at least 1"));
    }
    if features == 0 || features % 2 != 0 {
        return Err(Error::invalid(format!(
            "quadrature features come in cos/sin pairs; got odd or zero count {features}"
        )));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("kernel width must be positive, got {sigma}")));
    }
    let rule = gauss_hermite(nodes_for_degree(degree))?;
    // k(u) = E[cos(ωᵀu)], ω ~ N(0, σ⁻²I). Substituting ω = √2 t / σ turns each
    // coordinate into a Gauss–Hermite integral with normalized weights w/√π.
    let scale = std::f64::consts::SQRT_2 / sigma;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let probs: Vec<f64> = rule.weights.iter().map(|w| w / sqrt_pi).collect();
    // The dense-grid weight of a node is the product of its coordinates'
    // weights, so drawing a grid node proportionally to its weight is the
    // same as drawing every coordinate independently. The grid itself
    // (nodes^d points) is never materialized.
    let picker = WeightedIndex::new(&probs)
        .map_err(|e| Error::Numerical(format!("quadrature weights unusable: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = features / 2;
    let frequencies: Vec<Vec<f64>> = (0..pairs)
        .map(|_| {
            (0..input_dim)
                .map(|_| scale * rule.nodes[picker.sample(&mut rng)])
                .collect()
        })
        .collect();
    // Sampling proportionally to |weight| (all Gauss–Hermite product weights
    // are positive) leaves every drawn node with importance weight
    // (Σ|w|)/M = 1/M.
    let weights = vec![1.0 / pairs as f64; pairs];
    FeatureMap::from_parts(
        input_dim,
        sigma,
        Some(seed),
        MapParams::GaussQuadrature {
            degree,
            frequencies,
            weights,
        },
    )
}
