use super::gradient::{sig_weight, window_ip};
use super::{check_input, Step};
use crate::error::{Error, Result};
use crate::kernel::{gaussian_sq, sq_dist};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DictRule {
    Klms,
    Kmcc,
    KmeeSig,
}

/// Growing-dictionary kernel filter: `f(x) = Σ aₖ G_σ(cₖ, x)`.
///
/// With `q_factor > 0` a new sample within `q_factor` of its nearest
/// center is folded into that center instead of becoming a new one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictFilter {
    rule: DictRule,
    dim: usize,
    /// Row-major, `dim` values per center.
    centers: Vec<f64>,
    coeffs: Vec<f64>,
    q_factor: f64,
    eta: f64,
    sigma: f64,
    sigma_c: f64,
    ip_width: f64,
    window: usize,
    /// (center index, error) of recent samples, for SIG updates.
    history: VecDeque<(usize, f64)>,
    n_updates: u64,
}

impl DictFilter {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rule: DictRule,
        dim: usize,
        eta: f64,
        sigma: f64,
        sigma_c: f64,
        ip_width: f64,
        window: usize,
        q_factor: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("input dimension must be at least 1"));
        }
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::invalid(format!("learning rate must be positive, got {eta}")));
        }
        if !(sigma > 0.0 && sigma_c > 0.0 && ip_width > 0.0) {
            return Err(Error::invalid("kernel widths must be positive"));
        }
        if !(q_factor >= 0.0 && q_factor.is_finite()) {
            return Err(Error::invalid(format!("q_factor must be non-negative, got {q_factor}")));
        }
        if rule == DictRule::KmeeSig && window == 0 {
            return Err(Error::invalid("history window must be at least 1"));
        }
        Ok(Self {
            rule,
            dim,
            centers: Vec::new(),
            coeffs: Vec::new(),
            q_factor,
            eta,
            sigma,
            sigma_c,
            ip_width,
            window: if rule == DictRule::KmeeSig { window } else { 0 },
            history: VecDeque::new(),
            n_updates: 0,
        })
    }

    pub fn rule(&self) -> DictRule {
        self.rule
    }

    pub fn input_dim(&self) -> usize {
        self.dim
    }

    pub fn model_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn n_updates(&self) -> u64 {
        self.n_updates
    }

    pub fn q_factor(&self) -> f64 {
        self.q_factor
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.centers[k * self.dim..(k + 1) * self.dim]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_input(x, self.dim, 0.0)?;
        Ok(self.eval(x))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.centers
            .chunks_exact(self.dim)
            .zip(&self.coeffs)
            .map(|(c, a)| a * gaussian_sq(sq_dist(c, x), self.sigma))
            .sum()
    }

    pub fn window_ip(&self) -> Option<f64> {
        if self.rule != DictRule::KmeeSig {
            return None;
        }
        let e: Vec<f64> = self.history.iter().map(|h| h.1).collect();
        Some(window_ip(&e, self.ip_width))
    }

    fn nearest(&self, x: &[f64]) -> Option<(usize, f64)> {
        self.centers
            .chunks_exact(self.dim)
            .map(|c| sq_dist(c, x))
            .enumerate()
            .fold(None, |best, (k, d)| match best {
                Some((_, bd)) if bd <= d => best,
                _ => Some((k, d)),
            })
    }

    /// Index of the center that absorbs `x` with coefficient `a`.
    fn insert(&mut self, x: &[f64], a: f64) -> usize {
        if self.q_factor > 0.0 {
            if let Some((k, d2)) = self.nearest(x) {
                if d2.sqrt() < self.q_factor {
                    self.coeffs[k] += a;
                    return k;
                }
            }
        }
        self.centers.extend_from_slice(x);
        self.coeffs.push(a);
        self.coeffs.len() - 1
    }

    pub fn update(&mut self, x: &[f64], y: f64) -> Result<Step> {
        check_input(x, self.dim, y)?;
        let prediction = self.eval(x);
        let e = y - prediction;
        if !e.is_finite() {
            return Err(Error::Numerical("prediction error is not finite".into()));
        }
        match self.rule {
            DictRule::Klms | DictRule::Kmcc => {
                let f = match self.rule {
                    DictRule::Kmcc => gaussian_sq(e * e, self.sigma_c),
                    _ => 1.0,
                };
                self.insert(x, self.eta * f * e);
            }
            DictRule::KmeeSig => {
                let l = self.history.len();
                let scale = if l == 0 {
                    0.0
                } else {
                    self.eta / (self.sigma_c * self.sigma_c * l as f64)
                };
                let terms: Vec<(usize, f64)> = self
                    .history
                    .iter()
                    .map(|&(k, ei)| (k, scale * sig_weight(e - ei, self.sigma_c)))
                    .collect();
                let total: f64 = terms.iter().map(|t| t.1).sum();
                let k = self.insert(x, total);
                for (j, t) in terms {
                    self.coeffs[j] -= t;
                }
                if self.history.len() == self.window {
                    self.history.pop_front();
                }
                self.history.push_back((k, e));
            }
        }
        self.n_updates += 1;
        Ok(Step { prediction, error: e })
    }
}
