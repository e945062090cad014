use super::gradient::{sig_gradient, window_ip};
use super::{check_input, Step};
use crate::error::{Error, Result};
use crate::kernel::dot;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearRule {
    Lms,
    MeeSig,
}

/// Linear filter `wᵀx` on the raw input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFilter {
    rule: LinearRule,
    w: Vec<f64>,
    eta: f64,
    sigma_c: f64,
    ip_width: f64,
    window: usize,
    history: VecDeque<(Vec<f64>, f64)>,
    n_updates: u64,
}

impl LinearFilter {
    pub fn new(rule: LinearRule, dim: usize, eta: f64, sigma_c: f64, ip_width: f64, window: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("input dimension must be at least 1"));
        }
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::invalid(format!("learning rate must be positive, got {eta}")));
        }
        if !(sigma_c > 0.0 && ip_width > 0.0) {
            return Err(Error::invalid("kernel widths must be positive"));
        }
        if rule == LinearRule::MeeSig && window == 0 {
            return Err(Error::invalid("history window must be at least 1"));
        }
        Ok(Self {
            rule,
            w: vec![0.0; dim],
            eta,
            sigma_c,
            ip_width,
            window: if rule == LinearRule::MeeSig { window } else { 0 },
            history: VecDeque::new(),
            n_updates: 0,
        })
    }

    pub fn rule(&self) -> LinearRule {
        self.rule
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn input_dim(&self) -> usize {
        self.w.len()
    }

    pub fn model_size(&self) -> usize {
        self.w.len()
    }

    pub fn n_updates(&self) -> u64 {
        self.n_updates
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_input(x, self.w.len(), 0.0)?;
        Ok(dot(&self.w, x))
    }

    pub fn window_ip(&self) -> Option<f64> {
        if self.rule != LinearRule::MeeSig {
            return None;
        }
        let e: Vec<f64> = self.history.iter().map(|h| h.1).collect();
        Some(window_ip(&e, self.ip_width))
    }

    pub fn update(&mut self, x: &[f64], y: f64) -> Result<Step> {
        check_input(x, self.w.len(), y)?;
        let prediction = dot(&self.w, x);
        let e = y - prediction;
        let g = match self.rule {
            LinearRule::Lms => x.iter().map(|v| e * v).collect(),
            LinearRule::MeeSig => {
                let (zs, es): (Vec<&[f64]>, Vec<f64>) =
                    self.history.iter().map(|h| (h.0.as_slice(), h.1)).unzip();
                sig_gradient(x, e, &zs, &es, self.sigma_c)?
            }
        };
        let w: Vec<f64> = self.w.iter().zip(&g).map(|(w, g)| w + self.eta * g).collect();
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("filter weights diverged".into()));
        }
        self.w = w;
        if self.rule == LinearRule::MeeSig {
            if self.history.len() == self.window {
                self.history.pop_front();
            }
            self.history.push_back((x.to_vec(), e));
        }
        self.n_updates += 1;
        Ok(Step { prediction, error: e })
    }
}
