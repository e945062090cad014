use super::{FeatureMap, MapParams};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn check(features: usize, sigma: f64) -> Result<()> {
    if features == 0 {
        return Err(Error::invalid("feature count must be at least 1"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("kernel width must be positive, got {sigma}")));
    }
    Ok(())
}

/// Rows of `ω ~ N(0, σ⁻² I_d)`.
fn gaussian_rows(rng: &mut ChaCha8Rng, rows: usize, input_dim: usize, sigma: f64) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            (0..input_dim)
                .map(|_| rng.sample::<f64, _>(StandardNormal) / sigma)
                .collect()
        })
        .collect()
}

pub(super) fn build_paired(
    input_dim: usize,
    features: usize,
    sigma: f64,
    seed: u64,
) -> Result<FeatureMap> {
    check(features, sigma)?;
    if features % 2 != 0 {
        return Err(Error::invalid(format!(
            "paired random Fourier features need an even count, got {features}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frequencies = gaussian_rows(&mut rng, features / 2, input_dim, sigma);
    FeatureMap::from_parts(input_dim, sigma, Some(seed), MapParams::RffPaired { frequencies })
}

pub(super) fn build_shifted(
    input_dim: usize,
    features: usize,
    sigma: f64,
    seed: u64,
) -> Result<FeatureMap> {
    check(features, sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frequencies = gaussian_rows(&mut rng, features, input_dim, sigma);
    let phases = (0..features)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    FeatureMap::from_parts(
        input_dim,
        sigma,
        Some(seed),
        MapParams::RffShifted {
            frequencies,
            phases,
        },
    )
}
