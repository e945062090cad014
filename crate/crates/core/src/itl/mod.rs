//! Information theoretic learning descriptors with interchangeable backends.
//!
//! Every descriptor is built from sums of unnormalized Gaussian kernels
//! `k(u) = exp(-‖u‖²/2w²)`. The Parzen constant `1/(√(2π)w)ᵈ` is dropped
//! throughout; it cancels in the Cauchy–Schwarz quantities and in the
//! correntropy coefficient, and it is what makes `1 - z̄ᵀz̄` a meaningful
//! denominator.
//!
//! Kernel widths follow the definitions of the descriptors. For a Parzen
//! width σ:
//!
//! | descriptor | default width |
//! |------------|---------------|
//! | IP, entropy, CIP, CS/ED divergence | `√2σ` (convolution of two Parzen kernels) |
//! | correntropy, correntropy coefficient | `σ` |
//! | QMI terms, QMI-CS/ED | `σ` |
//!
//! [`KernelWidths`] overrides any of them.
//!
//! Backends:
//! - [`Backend::Direct`]: pairwise sums, O(N²) time, no Gram matrix stored.
//! - [`Backend::Eips`]: feature-space means and the joint matrix
//!   `Z_XY = Σ z(xᵢ)z(yᵢ)ᵀ`, O(N·D) (O(N·D²) for QMI).
//! - [`Backend::Icd`]: incomplete Cholesky factors; CIP, correntropy, the
//!   coefficient and the divergences factor the stacked set `[X; Y]` once,
//!   QMI factors each variable on its own.

mod direct;
mod lowrank;
mod pairs;
mod stats;

pub use pairs::{accumulate_pairs, PairSummary};
pub use stats::{EipsStats, QmiTerms};

use crate::error::{Error, Result};
use crate::features::{FeatureMap, MapSpec};
use crate::icd::{icd_factor, IcdOptions};
use ndarray::{concatenate, ArrayView2, Axis};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Rows of a sample matrix, flattened row-major.
#[derive(Debug, Clone)]
pub(crate) struct Points {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl Points {
    pub(crate) fn new(x: ArrayView2<f64>) -> Self {
        Self {
            data: x.iter().copied().collect(),
            n: x.nrows(),
            d: x.ncols(),
        }
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "kebab-case")]
pub enum Backend {
    Direct,
    Eips { map: MapSpec },
    Icd { options: IcdOptions },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Direct => "direct",
            Backend::Eips { .. } => "eips",
            Backend::Icd { .. } => "icd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelWidths {
    /// IP, entropy, CIP and divergences.
    pub ip: f64,
    /// Correntropy and correntropy coefficient.
    pub correntropy: f64,
    /// QMI terms.
    pub qmi: f64,
}

impl KernelWidths {
    pub fn from_sigma(sigma: f64) -> Self {
        Self {
            ip: std::f64::consts::SQRT_2 * sigma,
            correntropy: sigma,
            qmi: sigma,
        }
    }

    /// Every descriptor at the same width.
    pub fn uniform(width: f64) -> Self {
        Self {
            ip: width,
            correntropy: width,
            qmi: width,
        }
    }

    fn validate(&self) -> Result<()> {
        for w in [self.ip, self.correntropy, self.qmi] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("kernel width must be positive, got {w}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Descriptor {
    /// Information potential.
    Ip,
    /// Rényi quadratic entropy.
    Entropy,
    /// Cross information potential.
    Cip,
    Correntropy,
    /// Correntropy coefficient.
    Cc,
    QmiCs,
    QmiEd,
    /// Cauchy–Schwarz divergence.
    Dcs,
    /// Euclidean distance divergence.
    Ded,
}

impl Descriptor {
    pub const ALL: [Descriptor; 9] = [
        Descriptor::Ip,
        Descriptor::Entropy,
        Descriptor::Cip,
        Descriptor::Correntropy,
        Descriptor::Cc,
        Descriptor::QmiCs,
        Descriptor::QmiEd,
        Descriptor::Dcs,
        Descriptor::Ded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Descriptor::Ip => "ip",
            Descriptor::Entropy => "entropy",
            Descriptor::Cip => "cip",
            Descriptor::Correntropy => "correntropy",
            Descriptor::Cc => "cc",
            Descriptor::QmiCs => "qmi-cs",
            Descriptor::QmiEd => "qmi-ed",
            Descriptor::Dcs => "dcs",
            Descriptor::Ded => "ded",
        }
    }

    /// Whether the descriptor takes a second sample set.
    pub fn needs_y(self) -> bool {
        !matches!(self, Descriptor::Ip | Descriptor::Entropy)
    }

    /// Whether `x` and `y` are paired samples (equal counts).
    pub fn paired(self) -> bool {
        matches!(
            self,
            Descriptor::Correntropy | Descriptor::Cc | Descriptor::QmiCs | Descriptor::QmiEd
        )
    }

    /// Whether `x` and `y` must live in the same space.
    fn same_space(self) -> bool {
        self.needs_y() && !matches!(self, Descriptor::QmiCs | Descriptor::QmiEd)
    }

    fn width(self, w: &KernelWidths) -> f64 {
        match self {
            Descriptor::Ip | Descriptor::Entropy | Descriptor::Cip | Descriptor::Dcs | Descriptor::Ded => w.ip,
            Descriptor::Correntropy | Descriptor::Cc => w.correntropy,
            Descriptor::QmiCs | Descriptor::QmiEd => w.qmi,
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Descriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Descriptor::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown descriptor `{s}`")))
    }
}

/// A descriptor value, with the ICD rank when that backend produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Stacked-set rank, or the mean of the two per-variable ranks for QMI.
    pub rank: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimator {
    backend: Backend,
    widths: KernelWidths,
}

impl Estimator {
    /// Estimator with the default widths for Parzen width `sigma`.
    pub fn new(backend: Backend, sigma: f64) -> Result<Self> {
        Self::with_widths(backend, KernelWidths::from_sigma(sigma))
    }

    pub fn with_widths(backend: Backend, widths: KernelWidths) -> Result<Self> {
        widths.validate()?;
        if let Backend::Icd { options } = &backend {
            if !(options.epsilon > 0.0) {
                return Err(Error::invalid("ICD tolerance must be positive"));
            }
        }
        Ok(Self { backend, widths })
    }

    pub fn direct(sigma: f64) -> Result<Self> {
        Self::new(Backend::Direct, sigma)
    }

    pub fn eips(map: MapSpec, sigma: f64) -> Result<Self> {
        Self::new(Backend::Eips { map }, sigma)
    }

    pub fn icd(options: IcdOptions, sigma: f64) -> Result<Self> {
        Self::new(Backend::Icd { options }, sigma)
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn widths(&self) -> &KernelWidths {
        &self.widths
    }

    /// Does the per-descriptor setup (feature-map construction for the EIPS
    /// backend) so it can be excluded from timing.
    pub fn prepare(&self, descriptor: Descriptor, dx: usize, dy: usize) -> Result<Prepared<'_>> {
        let width = descriptor.width(&self.widths);
        let maps = match &self.backend {
            Backend::Eips { map } => {
                let fx = map.build(dx, width)?;
                let fy = if dy == dx {
                    fx.clone()
                } else {
                    map.build(dy, width)?
                };
                Some((fx, fy))
            }
            _ => None,
        };
        Ok(Prepared {
            estimator: self,
            descriptor,
            width,
            maps,
        })
    }

    /// One-shot evaluation; `y` is required for every descriptor except IP
    /// and entropy.
    pub fn evaluate(
        &self,
        descriptor: Descriptor,
        x: ArrayView2<f64>,
        y: Option<ArrayView2<f64>>,
    ) -> Result<Evaluation> {
        let dy = y.map_or(x.ncols(), |y| y.ncols());
        self.prepare(descriptor, x.ncols(), dy)?.evaluate(x, y)
    }

    pub fn information_potential(&self, x: ArrayView2<f64>) -> Result<f64> {
        Ok(self.evaluate(Descriptor::Ip, x, None)?.value)
    }

    /// `-log IP(X)`.
    pub fn renyi_entropy(&self, x: ArrayView2<f64>) -> Result<f64> {
        Ok(self.evaluate(Descriptor::Entropy, x, None)?.value)
    }

    pub fn cross_information_potential(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<f64> {
        Ok(self.evaluate(Descriptor::Cip, x, Some(y))?.value)
    }

    pub fn correntropy(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<f64> {
        Ok(self.evaluate(Descriptor::Correntropy, x, Some(y))?.value)
    }

    pub fn correntropy_coefficient(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<f64> {
        Ok(self.evaluate(Descriptor::Cc, x, Some(y))?.value)
    }

    pub fn qmi_terms(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<QmiTerms> {
        let p = self.prepare(Descriptor::QmiCs, x.ncols(), y.ncols())?;
        p.check(x, Some(y))?;
        Ok(p.qmi(x, y)?.0)
    }

    pub fn qmi_cs(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<f64> {
        Ok(self.evaluate(Descriptor::QmiCs, x, Some(y))?.value)
    }

    pub fn qmi_ed(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<f64> {
        Ok(self.evaluate(Descriptor::QmiEd, x, Some(y))?.value)
    }

    pub fn divergence_cs(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<f64> {
        Ok(self.evaluate(Descriptor::Dcs, x, Some(y))?.value)
    }

    pub fn divergence_ed(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<f64> {
        Ok(self.evaluate(Descriptor::Ded, x, Some(y))?.value)
    }
}

/// An estimator bound to one descriptor, with any feature maps already built.
#[derive(Debug, Clone)]
pub struct Prepared<'a> {
    estimator: &'a Estimator,
    descriptor: Descriptor,
    width: f64,
    maps: Option<(FeatureMap, FeatureMap)>,
}

impl Prepared<'_> {
    pub fn descriptor(&self) -> Descriptor {
        self.descriptor
    }

    /// Kernel width this descriptor is evaluated at.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// Feature dimension of the x map (EIPS backend only).
    pub fn feature_dim(&self) -> Option<usize> {
        self.maps.as_ref().map(|(fx, _)| fx.feature_dim())
    }

    fn check(&self, x: ArrayView2<f64>, y: Option<ArrayView2<f64>>) -> Result<()> {
        let desc = self.descriptor;
        if x.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let Some(y) = y else {
            if desc.needs_y() {
                return Err(Error::invalid(format!("`{desc}` needs a second sample set")));
            }
            return Ok(());
        };
        if y.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if desc.same_space() && y.ncols() != x.ncols() {
            return Err(Error::DimensionMismatch {
                expected: x.ncols(),
                got: y.ncols(),
            });
        }
        if desc.paired() && y.nrows() != x.nrows() {
            return Err(Error::LengthMismatch {
                left: x.nrows(),
                right: y.nrows(),
            });
        }
        if let Some((fx, fy)) = &self.maps {
            if fx.input_dim() != x.ncols() || fy.input_dim() != y.ncols() {
                return Err(Error::DimensionMismatch {
                    expected: fx.input_dim(),
                    got: x.ncols(),
                });
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: ArrayView2<f64>, y: Option<ArrayView2<f64>>) -> Result<Evaluation> {
        self.check(x, y)?;
        let w = self.width;
        let desc = self.descriptor;
        let y_or_x = y.unwrap_or(x);
        let plain = |value: f64| Evaluation { value, rank: None };

        match desc {
            Descriptor::QmiCs | Descriptor::QmiEd => {
                let (terms, rank) = self.qmi(x, y_or_x)?;
                let value = if desc == Descriptor::QmiCs {
                    terms.cs()?
                } else {
                    terms.ed()
                };
                return Ok(Evaluation { value, rank });
            }
            Descriptor::Ip | Descriptor::Entropy => {
                let (ip, rank) = match &self.estimator.backend {
                    Backend::Direct => (direct::information_potential(&Points::new(x), w), None),
                    Backend::Eips { .. } => {
                        let (fx, _) = self.maps.as_ref().expect("prepared maps");
                        (EipsStats::build(fx, x, None)?.information_potential()?, None)
                    }
                    Backend::Icd { options } => {
                        let f = icd_factor(x, w, options)?;
                        (lowrank::information_potential(&f), Some(f.rank() as f64))
                    }
                };
                let value = if desc == Descriptor::Ip { ip } else { -ip.ln() };
                return Ok(Evaluation { value, rank });
            }
            _ => {}
        }

        let y = y_or_x;
        match &self.estimator.backend {
            Backend::Direct => {
                let (px, py) = (Points::new(x), Points::new(y));
                let value = match desc {
                    Descriptor::Cip => direct::cross_information_potential(&px, &py, w),
                    Descriptor::Correntropy => direct::correntropy(&px, &py, w),
                    Descriptor::Cc => {
                        let (v, cip, ipx, ipy) = direct::correntropy_terms(&px, &py, w);
                        stats::coefficient(v, cip, ipx, ipy)?
                    }
                    Descriptor::Dcs | Descriptor::Ded => {
                        let ipx = direct::information_potential(&px, w);
                        let ipy = direct::information_potential(&py, w);
                        let cip = direct::cross_information_potential(&px, &py, w);
                        divergence(desc, ipx, ipy, cip)?
                    }
                    _ => unreachable!(),
                };
                Ok(plain(value))
            }
            Backend::Eips { .. } => {
                let (fm, _) = self.maps.as_ref().expect("prepared maps");
                let value = match desc {
                    Descriptor::Correntropy | Descriptor::Cc => {
                        let s = EipsStats::build_with(fm, x, Some((fm, y)), false)?;
                        if desc == Descriptor::Cc {
                            s.correntropy_coefficient()?
                        } else {
                            s.correntropy()?
                        }
                    }
                    _ => {
                        let sx = EipsStats::build(fm, x, None)?;
                        let sy = EipsStats::build(fm, y, None)?;
                        let (zx, zy) = (sx.zbar_x(), sy.zbar_x());
                        let cip = crate::kernel::dot(&zx, &zy);
                        if desc == Descriptor::Cip {
                            cip
                        } else {
                            let ipx = crate::kernel::dot(&zx, &zx);
                            let ipy = crate::kernel::dot(&zy, &zy);
                            divergence(desc, ipx, ipy, cip)?
                        }
                    }
                };
                Ok(plain(value))
            }
            Backend::Icd { options } => {
                let stacked = concatenate(Axis(0), &[x, y]).expect("same column count");
                let f = icd_factor(stacked.view(), w, options)?;
                let blocks = lowrank::Stacked {
                    factor: &f,
                    nx: x.nrows(),
                };
                let (ipx, ipy, cip) = blocks.potentials();
                let value = match desc {
                    Descriptor::Cip => cip,
                    Descriptor::Correntropy => blocks.correntropy(),
                    Descriptor::Cc => stats::coefficient(blocks.correntropy(), cip, ipx, ipy)?,
                    Descriptor::Dcs | Descriptor::Ded => divergence(desc, ipx, ipy, cip)?,
                    _ => unreachable!(),
                };
                Ok(Evaluation {
                    value,
                    rank: Some(f.rank() as f64),
                })
            }
        }
    }

    fn qmi(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<(QmiTerms, Option<f64>)> {
        let w = self.width;
        match &self.estimator.backend {
            Backend::Direct => Ok((direct::qmi_terms(&Points::new(x), &Points::new(y), w), None)),
            Backend::Eips { .. } => {
                let (fx, fy) = self.maps.as_ref().expect("prepared maps");
                Ok((EipsStats::build(fx, x, Some((fy, y)))?.qmi_terms()?, None))
            }
            Backend::Icd { options } => {
                let fx = icd_factor(x, w, options)?;
                let fy = icd_factor(y, w, options)?;
                let rank = (fx.rank() + fy.rank()) as f64 / 2.0;
                Ok((lowrank::qmi_terms(&fx, &fy), Some(rank)))
            }
        }
    }
}

fn divergence(desc: Descriptor, ipx: f64, ipy: f64, cip: f64) -> Result<f64> {
    if desc == Descriptor::Ded {
        return Ok(ipx + ipy - 2.0 * cip);
    }
    if cip < 1e-300 {
        return Err(Error::Degenerate(format!(
            "cross information potential {cip:e} too small for the Cauchy-Schwarz ratio"
        )));
    }
    Ok((ipx * ipy / (cip * cip)).ln())
}
