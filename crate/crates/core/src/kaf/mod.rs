//! Online kernel adaptive filters.
//!
//! The no-trick filters ([`NtFilter`]) learn a weight vector in the
//! explicit feature space of a [`FeatureMap`], so each step costs the same
//! no matter how many samples have been seen. The growing-dictionary
//! filters ([`DictFilter`]) and the linear filters ([`LinearFilter`]) are
//! the usual baselines.
//!
//! [`Filter`] wraps all of them behind one serializable type built from a
//! [`FilterConfig`].

mod dict;
pub mod gradient;
mod linear;
mod nt;
mod run;

pub use dict::{DictFilter, DictRule};
pub use gradient::{ip_gradient_direct, ip_gradient_eips, sig_gradient, window_ip, IpGradient};
pub use linear::{LinearFilter, LinearRule};
pub use nt::{HistoryEntry, NtFilter, NtRule};
pub use run::{run_trial, test_mse, CurvePoint, TrialOptions, TrialResult};

use crate::error::{Error, Result};
use crate::features::{FeatureMap, MapSpec};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Prediction and a-priori error of one update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub prediction: f64,
    pub error: f64,
}

pub(crate) fn check_input(x: &[f64], dim: usize, y: f64) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Lms,
    LmeeSig,
    Klms,
    Kmcc,
    Qkmcc,
    KmeeSig,
    QkmeeSig,
    NtKlms,
    NtKmcc,
    /// Full IP gradient, pairwise Gaussian on errors.
    NtKmee,
    /// Full IP gradient, Taylor features on errors.
    NtKmeeTs,
    NtKmeeSig,
}

impl Algorithm {
    pub const ALL: [Algorithm; 12] = [
        Algorithm::Lms,
        Algorithm::LmeeSig,
        Algorithm::Klms,
        Algorithm::Kmcc,
        Algorithm::Qkmcc,
        Algorithm::KmeeSig,
        Algorithm::QkmeeSig,
        Algorithm::NtKlms,
        Algorithm::NtKmcc,
        Algorithm::NtKmee,
        Algorithm::NtKmeeTs,
        Algorithm::NtKmeeSig,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lms => "lms",
            Algorithm::LmeeSig => "lmee-sig",
            Algorithm::Klms => "klms",
            Algorithm::Kmcc => "kmcc",
            Algorithm::Qkmcc => "qkmcc",
            Algorithm::KmeeSig => "kmee-sig",
            Algorithm::QkmeeSig => "qkmee-sig",
            Algorithm::NtKlms => "nt-klms",
            Algorithm::NtKmcc => "nt-kmcc",
            Algorithm::NtKmee => "nt-kmee",
            Algorithm::NtKmeeTs => "nt-kmee-ts",
            Algorithm::NtKmeeSig => "nt-kmee-sig",
        }
    }

    /// Whether the algorithm keeps an error window and reports its IP.
    pub fn tracks_ip(self) -> bool {
        matches!(
            self,
            Algorithm::LmeeSig
                | Algorithm::KmeeSig
                | Algorithm::QkmeeSig
                | Algorithm::NtKmee
                | Algorithm::NtKmeeTs
                | Algorithm::NtKmeeSig
        )
    }

    /// 0.4 for the LMS and correntropy filters; 0.05 for the error-entropy
    /// filters, whose full-window gradient reuses stored errors for `L`
    /// steps and overshoots at larger rates.
    pub fn default_eta(self) -> f64 {
        if self.tracks_ip() {
            0.05
        } else {
            0.4
        }
    }

    pub fn uses_feature_map(self) -> bool {
        matches!(
            self,
            Algorithm::NtKlms | Algorithm::NtKmcc | Algorithm::NtKmee | Algorithm::NtKmeeTs | Algorithm::NtKmeeSig
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// Case-insensitive; hyphens and underscores are optional (`ntkmcc`).
    fn from_str(s: &str) -> Result<Self> {
        let key = |t: &str| t.to_ascii_lowercase().replace(['-', '_'], "");
        let want = key(s);
        Algorithm::ALL
            .into_iter()
            .find(|a| key(a.name()) == want)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm `{s}`")))
    }
}

/// Hyperparameters shared by every filter; each algorithm reads the ones
/// it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub algorithm: Algorithm,
    /// Learning rate; [`Algorithm::default_eta`] when unset.
    pub eta: Option<f64>,
    /// Input kernel width (dictionary filters and the feature map).
    pub sigma: f64,
    /// Correntropy / SIG width.
    pub sigma_c: f64,
    /// Error-kernel width of the full IP gradient and the reported IP;
    /// `√2·sigma_c` when unset.
    pub ip_width: Option<f64>,
    pub window: usize,
    /// Quantization radius of the quantized algorithms.
    pub q_factor: f64,
    pub map: MapSpec,
    /// Taylor degree of the error map of `nt-kmee-ts` (features = degree + 1).
    pub error_degree: u32,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::NtKmcc,
            eta: None,
            sigma: std::f64::consts::FRAC_1_SQRT_2,
            sigma_c: std::f64::consts::FRAC_1_SQRT_2,
            ip_width: None,
            window: 200,
            q_factor: 0.07,
            map: MapSpec::GaussQuadrature {
                degree: 8,
                features: 330,
                seed: 0,
            },
            error_degree: 4,
        }
    }
}

impl FilterConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta.unwrap_or(self.algorithm.default_eta())
    }

    pub fn ip_width(&self) -> f64 {
        self.ip_width
            .unwrap_or(std::f64::consts::SQRT_2 * self.sigma_c)
    }

    pub fn build(&self, input_dim: usize) -> Result<Filter> {
        use Algorithm as A;
        let ipw = self.ip_width();
        let eta = self.eta();
        let nt = |rule: NtRule, err_map: Option<FeatureMap>| -> Result<Filter> {
            let fm = self.map.build(input_dim, self.sigma)?;
            Ok(Filter::Nt(NtFilter::new(
                rule,
                fm,
                err_map,
                eta,
                self.sigma_c,
                ipw,
                self.window,
            )?))
        };
        let dict = |rule: DictRule, q: f64| -> Result<Filter> {
            Ok(Filter::Dict(DictFilter::new(
                rule,
                input_dim,
                eta,
                self.sigma,
                self.sigma_c,
                ipw,
                self.window,
                q,
            )?))
        };
        let linear = |rule: LinearRule| -> Result<Filter> {
            Ok(Filter::Linear(LinearFilter::new(
                rule,
                input_dim,
                eta,
                self.sigma_c,
                ipw,
                self.window,
            )?))
        };
        match self.algorithm {
            A::Lms => linear(LinearRule::Lms),
            A::LmeeSig => linear(LinearRule::MeeSig),
            A::Klms => dict(DictRule::Klms, 0.0),
            A::Kmcc => dict(DictRule::Kmcc, 0.0),
            A::Qkmcc => dict(DictRule::Kmcc, self.q_factor),
            A::KmeeSig => dict(DictRule::KmeeSig, 0.0),
            A::QkmeeSig => dict(DictRule::KmeeSig, self.q_factor),
            A::NtKlms => nt(NtRule::Klms, None),
            A::NtKmcc => nt(NtRule::Kmcc, None),
            A::NtKmee => nt(NtRule::KmeeDirect, None),
            A::NtKmeeTs => nt(
                NtRule::KmeeEips,
                Some(FeatureMap::taylor(1, self.error_degree, ipw)?),
            ),
            A::NtKmeeSig => nt(NtRule::KmeeSig, None),
        }
    }
}

/// Any filter, as one serializable value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Filter {
    Nt(NtFilter),
    Dict(DictFilter),
    Linear(LinearFilter),
}

macro_rules! each {
    ($self:expr, $f:ident => $body:expr) => {
        match $self {
            Filter::Nt($f) => $body,
            Filter::Dict($f) => $body,
            Filter::Linear($f) => $body,
        }
    };
}

impl Filter {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        each!(self, f => f.predict(x))
    }

    /// Predicts `y` from `x`, then adapts. Invalid input or a diverging
    /// update leaves the state untouched.
    pub fn update(&mut self, x: &[f64], y: f64) -> Result<Step> {
        each!(self, f => f.update(x, y))
    }

    /// Weight count for feature-space and linear filters, dictionary size
    /// otherwise.
    pub fn model_size(&self) -> usize {
        each!(self, f => f.model_size())
    }

    pub fn input_dim(&self) -> usize {
        each!(self, f => f.input_dim())
    }

    pub fn n_updates(&self) -> u64 {
        each!(self, f => f.n_updates())
    }

    pub fn window_ip(&self) -> Option<f64> {
        each!(self, f => f.window_ip())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
