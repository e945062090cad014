use crate::error::{Error, Result};
use crate::features::FeatureMap;
use crate::kernel::dot;
use ndarray::{Array2, ArrayView2};

/// Sufficient statistics of one or two mapped sample sets.
///
/// Sums are stored rather than means, so incremental and batch construction
/// perform the same floating-point additions in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct EipsStats {
    n: usize,
    sum_x: Vec<f64>,
    sum_y: Option<Vec<f64>>,
    /// `Σ z(xᵢ) z(yᵢ)ᵀ`, `Dx × Dy`.
    zxy: Option<Array2<f64>>,
    /// `Σ z(xᵢ)ᵀ z(yᵢ)`, only when `Dx == Dy`.
    diag_sum: Option<f64>,
}

/// The three quadratic mutual information building blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmiTerms {
    pub vj: f64,
    pub vm: f64,
    pub vc: f64,
}

impl QmiTerms {
    pub fn cs(&self) -> Result<f64> {
        if self.vc < 1e-300 {
            return Err(Error::Degenerate(format!(
                "cross term V_C = {:e} too small for the Cauchy-Schwarz ratio",
                self.vc
            )));
        }
        Ok((self.vj * self.vm / (self.vc * self.vc)).ln())
    }

    pub fn ed(&self) -> f64 {
        self.vj + self.vm - 2.0 * self.vc
    }
}

impl EipsStats {
    /// Empty statistics for marginal (`dy = None`) or paired use.
    pub fn new(dx: usize, dy: Option<usize>) -> Self {
        Self::with_joint(dx, dy, true)
    }

    /// As [`EipsStats::new`]; `joint = false` skips the `Dx × Dy` matrix,
    /// which only the QMI terms need.
    pub fn with_joint(dx: usize, dy: Option<usize>, joint: bool) -> Self {
        Self {
            n: 0,
            sum_x: vec![0.0; dx],
            sum_y: dy.map(|d| vec![0.0; d]),
            zxy: dy.filter(|_| joint).map(|d| Array2::zeros((dx, d))),
            diag_sum: dy.filter(|d| *d == dx).map(|_| 0.0),
        }
    }

    /// Maps every row of `x` (and `y`) and accumulates.
    pub fn build(
        fm_x: &FeatureMap,
        x: ArrayView2<f64>,
        y: Option<(&FeatureMap, ArrayView2<f64>)>,
    ) -> Result<Self> {
        Self::build_with(fm_x, x, y, true)
    }

    pub fn build_with(
        fm_x: &FeatureMap,
        x: ArrayView2<f64>,
        y: Option<(&FeatureMap, ArrayView2<f64>)>,
        joint: bool,
    ) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some((_, y)) = &y {
            if y.nrows() != x.nrows() {
                return Err(Error::LengthMismatch {
                    left: x.nrows(),
                    right: y.nrows(),
                });
            }
        }
        let zx = fm_x.map_batch(x)?;
        let zy = match y {
            Some((fm_y, y)) => Some(fm_y.map_batch(y)?),
            None => None,
        };
        Self::accumulate(zx.view(), zy.as_ref().map(|z| z.view()), joint)
    }

    /// Accumulates already mapped rows.
    pub fn from_features(zx: ArrayView2<f64>, zy: Option<ArrayView2<f64>>) -> Result<Self> {
        Self::accumulate(zx, zy, true)
    }

    fn accumulate(zx: ArrayView2<f64>, zy: Option<ArrayView2<f64>>, joint: bool) -> Result<Self> {
        let mut s = Self::with_joint(zx.ncols(), zy.map(|z| z.ncols()), joint);
        if let Some(zy) = zy {
            if zy.nrows() != zx.nrows() {
                return Err(Error::LengthMismatch {
                    left: zx.nrows(),
                    right: zy.nrows(),
                });
            }
            for (a, b) in zx.outer_iter().zip(zy.outer_iter()) {
                s.update(&a.to_vec(), Some(&b.to_vec()))?;
            }
        } else {
            for a in zx.outer_iter() {
                s.update(&a.to_vec(), None)?;
            }
        }
        Ok(s)
    }

    /// Adds one mapped sample (pair).
    pub fn update(&mut self, zx: &[f64], zy: Option<&[f64]>) -> Result<()> {
        if zx.len() != self.sum_x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.sum_x.len(),
                got: zx.len(),
            });
        }
        match (&mut self.sum_y, zy) {
            (Some(sum_y), Some(zy)) => {
                if zy.len() != sum_y.len() {
                    return Err(Error::DimensionMismatch {
                        expected: sum_y.len(),
                        got: zy.len(),
                    });
                }
                for (s, v) in sum_y.iter_mut().zip(zy) {
                    *s += v;
                }
                if let Some(m) = self.zxy.as_mut() {
                    for (mut row, a) in m.outer_iter_mut().zip(zx) {
                        for (r, b) in row.iter_mut().zip(zy) {
                            *r += a * b;
                        }
                    }
                }
                if let Some(d) = self.diag_sum.as_mut() {
                    *d += dot(zx, zy);
                }
            }
            (None, None) => {}
            (Some(_), None) => return Err(Error::invalid("paired statistics need a y sample")),
            (None, Some(_)) => return Err(Error::invalid("marginal statistics take no y sample")),
        }
        for (s, v) in self.sum_x.iter_mut().zip(zx) {
            *s += v;
        }
        self.n += 1;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn zbar_x(&self) -> Vec<f64> {
        self.mean(&self.sum_x)
    }

    pub fn zbar_y(&self) -> Option<Vec<f64>> {
        self.sum_y.as_ref().map(|s| self.mean(s))
    }

    /// `Σ z(xᵢ) z(yᵢ)ᵀ` (unnormalized).
    pub fn zxy(&self) -> Option<&Array2<f64>> {
        self.zxy.as_ref()
    }

    pub fn diag_sum(&self) -> Option<f64> {
        self.diag_sum
    }

    fn mean(&self, s: &[f64]) -> Vec<f64> {
        let n = self.n as f64;
        s.iter().map(|v| v / n).collect()
    }

    fn require_n(&self) -> Result<f64> {
        if self.n == 0 {
            Err(Error::EmptyInput)
        } else {
            Ok(self.n as f64)
        }
    }

    fn paired(&self) -> Result<&[f64]> {
        self.sum_y
            .as_deref()
            .ok_or_else(|| Error::invalid("descriptor needs paired statistics"))
    }

    /// `z̄(x)ᵀ z̄(x)`.
    pub fn information_potential(&self) -> Result<f64> {
        let n = self.require_n()?;
        Ok(dot(&self.sum_x, &self.sum_x) / (n * n))
    }

    /// `z̄(x)ᵀ z̄(y)` for paired statistics with a shared map.
    pub fn cross_information_potential(&self) -> Result<f64> {
        let n = self.require_n()?;
        let sy = self.paired()?;
        if sy.len() != self.sum_x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.sum_x.len(),
                got: sy.len(),
            });
        }
        Ok(dot(&self.sum_x, sy) / (n * n))
    }

    /// `(1/N) Σ z(xᵢ)ᵀ z(yᵢ)`.
    pub fn correntropy(&self) -> Result<f64> {
        let n = self.require_n()?;
        self.diag_sum
            .map(|d| d / n)
            .ok_or_else(|| Error::invalid("correntropy needs a shared feature map for x and y"))
    }

    pub fn correntropy_coefficient(&self) -> Result<f64> {
        let n = self.require_n()?;
        let sy = self.paired()?;
        let v = self.correntropy()?;
        let cip = self.cross_information_potential()?;
        let ipx = dot(&self.sum_x, &self.sum_x) / (n * n);
        let ipy = dot(sy, sy) / (n * n);
        coefficient(v, cip, ipx, ipy)
    }

    pub fn qmi_terms(&self) -> Result<QmiTerms> {
        let n = self.require_n()?;
        let sy = self.paired()?;
        let m = self
            .zxy
            .as_ref()
            .ok_or_else(|| Error::invalid("QMI terms need the joint matrix"))?;
        let vj = m.iter().map(|v| v * v).sum::<f64>() / (n * n);
        let vm = dot(&self.sum_x, &self.sum_x) * dot(sy, sy) / (n * n * n * n);
        let my: Vec<f64> = m.outer_iter().map(|row| dot(row.as_slice().unwrap(), sy)).collect();
        let vc = dot(&self.sum_x, &my) / (n * n * n);
        Ok(QmiTerms { vj, vm, vc })
    }
}

/// `(V - CIP) / √((1 - IPx)(1 - IPy))` with a degeneracy guard.
pub(crate) fn coefficient(v: f64, cip: f64, ipx: f64, ipy: f64) -> Result<f64> {
    const TOL: f64 = 1e-12;
    let (a, b) = (1.0 - ipx, 1.0 - ipy);
    if a <= TOL || b <= TOL {
        return Err(Error::Degenerate(
            "correntropy coefficient undefined: a marginal sample is (numerically) constant"
                .into(),
        ));
    }
    Ok((v - cip) / (a * b).sqrt())
}
