//! Explicit feature maps whose inner products define finite-rank kernels
//! approximating the Gaussian kernel `exp(-‖x-x'‖²/2σ²)`.
//!
//! Four constructions are available:
//!
//! | kind | features | induced kernel |
//! |------|----------|----------------|
//! | Taylor | one per monomial of degree ≤ r, `C(d+r, r)` total | truncated power series, exact up to degree r |
//! | Gauss–Hermite quadrature | cos/sin pair per sampled grid node | subsampled tensor-product quadrature of the spectral integral |
//! | RFF (paired) | cos/sin pair per Gaussian frequency | Monte-Carlo spectral integral, `k'(x,x) = 1` |
//! | RFF (shifted) | `cos(ωᵀx + b)` per frequency | Monte-Carlo spectral integral with random phases |
//!
//! The two RFF constructions are the "paired" and "phase-shifted" variants
//! commonly labelled RFF1/RFF2 in the no-trick filtering literature.
//!
//! A [`FeatureMap`] is immutable once built; [`FeatureMap::map`] and
//! [`FeatureMap::map_batch`] are pure and can be shared across threads.

mod fourier;
mod quadrature;
mod taylor;

pub use quadrature::{gauss_hermite, GaussHermiteRule};
pub use taylor::{taylor_feature_count, taylor_required_degree, DEFAULT_FEATURE_CAP};

use crate::error::{Error, Result};
use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

/// Kind-specific parameters of a feature map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapParams {
    Taylor {
        degree: u32,
        /// Monomial exponent table, graded lexicographic order.
        exponents: Vec<Vec<u32>>,
    },
    GaussQuadrature {
        /// Polynomial degree the 1-D rule was requested for.
        degree: u32,
        /// Sampled frequency vectors (already divided by σ), one per cos/sin pair.
        frequencies: Vec<Vec<f64>>,
        /// Quadrature weight of each sampled node; the pair is scaled by `√weight`.
        weights: Vec<f64>,
    },
    RffPaired {
        frequencies: Vec<Vec<f64>>,
    },
    RffShifted {
        frequencies: Vec<Vec<f64>>,
        phases: Vec<f64>,
    },
}

/// Discriminant of [`MapParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Taylor,
    GaussQuadrature,
    RffPaired,
    RffShifted,
}

/// Serialized form: `{kind, d, D, sigma, seed, params...}`.
#[derive(Serialize, Deserialize)]
struct FeatureMapRepr {
    d: usize,
    #[serde(rename = "D")]
    feature_dim: usize,
    sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(flatten)]
    params: MapParams,
}

/// An explicit feature map `z: ℝᵈ → ℝᴰ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FeatureMapRepr", into = "FeatureMapRepr")]
pub struct FeatureMap {
    input_dim: usize,
    feature_dim: usize,
    sigma: f64,
    seed: Option<u64>,
    params: MapParams,
    eval: Evaluator,
}

/// Flattened, evaluation-ready copy of the parameters.
#[derive(Debug, Clone, PartialEq)]
enum Evaluator {
    Taylor {
        degree: usize,
        /// Row-major `D × d` exponent table.
        exponents: Vec<u32>,
    },
    Trig {
        /// Row-major `M × d` frequency matrix.
        omega: Vec<f64>,
        /// Per-row output scale.
        scale: Vec<f64>,
        /// `Some` for the shifted single-cosine variant.
        phases: Option<Vec<f64>>,
    },
}

impl FeatureMap {
    pub(crate) fn from_parts(
        input_dim: usize,
        sigma: f64,
        seed: Option<u64>,
        params: MapParams,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::invalid("input dimension must be at least 1"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("kernel width must be positive, got {sigma}")));
        }
        let flatten = |rows: &[Vec<f64>]| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(rows.len() * input_dim);
            for r in rows {
                if r.len() != input_dim {
                    return Err(Error::DimensionMismatch {
                        expected: input_dim,
                        got: r.len(),
                    });
                }
                out.extend_from_slice(r);
            }
            Ok(out)
        };
        let (feature_dim, eval) = match &params {
            MapParams::Taylor { degree, exponents } => {
                let mut flat = Vec::with_capacity(exponents.len() * input_dim);
                for e in exponents {
                    if e.len() != input_dim {
                        return Err(Error::DimensionMismatch {
                            expected: input_dim,
                            got: e.len(),
                        });
                    }
                    if e.iter().sum::<u32>() > *degree {
                        return Err(Error::invalid("monomial exceeds the map degree"));
                    }
                    flat.extend_from_slice(e);
                }
                (
                    exponents.len(),
                    Evaluator::Taylor {
                        degree: *degree as usize,
                        exponents: flat,
                    },
                )
            }
            MapParams::GaussQuadrature {
                frequencies,
                weights,
                ..
            } => {
                if weights.len() != frequencies.len() {
                    return Err(Error::LengthMismatch {
                        left: frequencies.len(),
                        right: weights.len(),
                    });
                }
                if weights.iter().any(|w| !(*w >= 0.0)) {
                    return Err(Error::invalid("quadrature weights must be non-negative"));
                }
                (
                    2 * frequencies.len(),
                    Evaluator::Trig {
                        omega: flatten(frequencies)?,
                        scale: weights.iter().map(|w| w.sqrt()).collect(),
                        phases: None,
                    },
                )
            }
            MapParams::RffPaired { frequencies } => {
                let dim = 2 * frequencies.len();
                let s = (2.0 / dim as f64).sqrt();
                (
                    dim,
                    Evaluator::Trig {
                        omega: flatten(frequencies)?,
                        scale: vec![s; frequencies.len()],
                        phases: None,
                    },
                )
            }
            MapParams::RffShifted {
                frequencies,
                phases,
            } => {
                if phases.len() != frequencies.len() {
                    return Err(Error::LengthMismatch {
                        left: frequencies.len(),
                        right: phases.len(),
                    });
                }
                let dim = frequencies.len();
                let s = (2.0 / dim as f64).sqrt();
                (
                    dim,
                    Evaluator::Trig {
                        omega: flatten(frequencies)?,
                        scale: vec![s; dim],
                        phases: Some(phases.clone()),
                    },
                )
            }
        };
        if feature_dim == 0 {
            return Err(Error::invalid("feature dimension must be at least 1"));
        }
        Ok(Self {
            input_dim,
            feature_dim,
            sigma,
            seed,
            params,
            eval,
        })
    }

    /// Taylor map of maximum degree `degree`, `C(d+r, r)` features.
    pub fn taylor(input_dim: usize, degree: u32, sigma: f64) -> Result<Self> {
        taylor::build(input_dim, degree, sigma, DEFAULT_FEATURE_CAP)
    }

    /// As [`FeatureMap::taylor`] with an explicit feature-count cap.
    pub fn taylor_capped(input_dim: usize, degree: u32, sigma: f64, cap: usize) -> Result<Self> {
        taylor::build(input_dim, degree, sigma, cap)
    }

    /// Gauss–Hermite quadrature map with `features` scalar features (must be
    /// even), drawn from the dense grid proportionally to the node weights.
    pub fn gauss_quadrature(
        input_dim: usize,
        degree: u32,
        features: usize,
        sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        quadrature::build(input_dim, degree, features, sigma, seed)
    }

    /// Random Fourier map with cos/sin pairs; `features` must be even.
    pub fn rff_paired(input_dim: usize, features: usize, sigma: f64, seed: u64) -> Result<Self> {
        fourier::build_paired(input_dim, features, sigma, seed)
    }

    /// Random Fourier map with random phases, `cos(ωᵀx + b)`.
    pub fn rff_shifted(input_dim: usize, features: usize, sigma: f64, seed: u64) -> Result<Self> {
        fourier::build_shifted(input_dim, features, sigma, seed)
    }

    pub fn kind(&self) -> MapKind {
        match self.params {
            MapParams::Taylor { .. } => MapKind::Taylor,
            MapParams::GaussQuadrature { .. } => MapKind::GaussQuadrature,
            MapParams::RffPaired { .. } => MapKind::RffPaired,
            MapParams::RffShifted { .. } => MapKind::RffShifted,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    /// The recipe that rebuilds this map (bit-identically) for a given input
    /// dimension and width.
    pub fn spec(&self) -> MapSpec {
        match &self.params {
            MapParams::Taylor { degree, .. } => MapSpec::Taylor { degree: *degree },
            MapParams::GaussQuadrature {
                degree,
                frequencies,
                ..
            } => MapSpec::GaussQuadrature {
                degree: *degree,
                features: 2 * frequencies.len(),
                seed: self.seed.unwrap_or_default(),
            },
            MapParams::RffPaired { .. } => MapSpec::RffPaired {
                features: self.feature_dim,
                seed: self.seed.unwrap_or_default(),
            },
            MapParams::RffShifted { .. } => MapSpec::RffShifted {
                features: self.feature_dim,
                seed: self.seed.unwrap_or_default(),
            },
        }
    }

    /// `z(x)`.
    pub fn map(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.feature_dim];
        self.map_into(x, &mut out)?;
        Ok(out)
    }

    /// Writes `z(x)` into `out`, which must have length `feature_dim`.
    pub fn map_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        if out.len() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                got: out.len(),
            });
        }
        match &self.eval {
            Evaluator::Taylor { degree, exponents } => {
                taylor::eval(x, self.sigma, *degree, exponents, out)
            }
            Evaluator::Trig {
                omega,
                scale,
                phases,
            } => {
                let d = self.input_dim;
                for (i, row) in omega.chunks_exact(d).enumerate() {
                    let theta: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
                    match phases {
                        Some(b) => out[i] = scale[i] * (theta + b[i]).cos(),
                        None => {
                            let (s, c) = theta.sin_cos();
                            out[2 * i] = scale[i] * c;
                            out[2 * i + 1] = scale[i] * s;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Row-wise [`FeatureMap::map`]; `N × d` in, `N × D` out.
    pub fn map_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.ncols(),
            });
        }
        let mut out = Array2::zeros((x.nrows(), self.feature_dim));
        let mut buf = vec![0.0; self.input_dim];
        for (row, mut dst) in x.outer_iter().zip(out.outer_iter_mut()) {
            buf.iter_mut().zip(row.iter()).for_each(|(b, v)| *b = *v);
            self.map_into(&buf, dst.as_slice_mut().expect("standard layout"))?;
        }
        Ok(out)
    }

    /// Induced kernel `⟨z(x), z(y)⟩`.
    pub fn kernel(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let zx = self.map(x)?;
        let zy = self.map(y)?;
        Ok(crate::kernel::dot(&zx, &zy))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl TryFrom<FeatureMapRepr> for FeatureMap {
    type Error = Error;

    fn try_from(r: FeatureMapRepr) -> Result<Self> {
        let fm = FeatureMap::from_parts(r.d, r.sigma, r.seed, r.params)?;
        if fm.feature_dim != r.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: r.feature_dim,
                got: fm.feature_dim,
            });
        }
        Ok(fm)
    }
}

impl From<FeatureMap> for FeatureMapRepr {
    fn from(fm: FeatureMap) -> Self {
        FeatureMapRepr {
            d: fm.input_dim,
            feature_dim: fm.feature_dim,
            sigma: fm.sigma,
            seed: fm.seed,
            params: fm.params,
        }
    }
}

/// Recipe for a feature map, independent of input dimension and width.
///
/// This is what callers configure; the estimators build the actual map once
/// they know the data dimension and the kernel width a descriptor needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapSpec {
    Taylor { degree: u32 },
    GaussQuadrature { degree: u32, features: usize, seed: u64 },
    RffPaired { features: usize, seed: u64 },
    RffShifted { features: usize, seed: u64 },
}

impl MapSpec {
    pub fn build(&self, input_dim: usize, sigma: f64) -> Result<FeatureMap> {
        match *self {
            MapSpec::Taylor { degree } => FeatureMap::taylor(input_dim, degree, sigma),
            MapSpec::GaussQuadrature {
                degree,
                features,
                seed,
            } => FeatureMap::gauss_quadrature(input_dim, degree, features, sigma, seed),
            MapSpec::RffPaired { features, seed } => {
                FeatureMap::rff_paired(input_dim, features, sigma, seed)
            }
            MapSpec::RffShifted { features, seed } => {
                FeatureMap::rff_shifted(input_dim, features, sigma, seed)
            }
        }
    }

    /// Short human-readable label, e.g. `taylor(r=9)`.
    pub fn label(&self) -> String {
        match self {
            MapSpec::Taylor { degree } => format!("taylor(r={degree})"),
            MapSpec::GaussQuadrature {
                degree, features, ..
            } => format!("gq(deg={degree},D={features})"),
            MapSpec::RffPaired { features, .. } => format!("rff-paired(D={features})"),
            MapSpec::RffShifted { features, .. } => format!("rff-shifted(D={features})"),
        }
    }
}
