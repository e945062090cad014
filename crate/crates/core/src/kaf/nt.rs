use super::gradient::{ip_gradient_direct, sig_gradient, window_ip};
use super::{check_input, Step};
use crate::error::{Error, Result};
use crate::features::FeatureMap;
use crate::kernel::{dot, gaussian_sq};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Update rule of a no-trick filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NtRule {
    Klms,
    Kmcc,
    /// Full windowed IP gradient, pairwise Gaussian on errors.
    KmeeDirect,
    /// Full windowed IP gradient through an explicit error map.
    KmeeEips,
    /// Stochastic information gradient.
    KmeeSig,
}

impl NtRule {
    fn uses_history(self) -> bool {
        matches!(self, NtRule::KmeeDirect | NtRule::KmeeEips | NtRule::KmeeSig)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub z: Vec<f64>,
    pub e: f64,
}

/// Running `A`, `E`, `b`, `c` of the factored IP gradient, kept in step
/// with the history so each update is O(D·D_e) regardless of window fill.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ErrorSums {
    a: Vec<f64>,
    m: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl ErrorSums {
    fn new(d: usize, de: usize) -> Self {
        Self {
            a: vec![0.0; d * de],
            m: vec![0.0; d * de],
            b: vec![0.0; de],
            c: vec![0.0; de],
        }
    }

    fn add(&mut self, z: &[f64], e: f64, ze: &[f64], sign: f64) {
        let de = ze.len();
        for k in 0..de {
            self.b[k] += sign * ze[k];
            self.c[k] += sign * e * ze[k];
        }
        for (r, &zr) in z.iter().enumerate() {
            let ra = &mut self.a[r * de..(r + 1) * de];
            let rm = &mut self.m[r * de..(r + 1) * de];
            for k in 0..de {
                let t = sign * zr * ze[k];
                rm[k] += t;
                ra[k] += e * t;
            }
        }
    }

    fn gradient(&self, d: usize, scale: f64) -> Vec<f64> {
        let de = self.b.len();
        (0..d)
            .map(|r| {
                let ra = &self.a[r * de..(r + 1) * de];
                let rm = &self.m[r * de..(r + 1) * de];
                let mut acc = 0.0;
                for k in 0..de {
                    acc += ra[k] * self.b[k] - rm[k] * self.c[k];
                }
                scale * acc
            })
            .collect()
    }
}

/// Kernel adaptive filter in an explicit feature space: the model is a
/// fixed-length weight vector `w`, prediction is `wᵀz(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NtFilter {
    rule: NtRule,
    w: Vec<f64>,
    fm: FeatureMap,
    err_map: Option<FeatureMap>,
    history: VecDeque<HistoryEntry>,
    window: usize,
    eta: f64,
    sigma_c: f64,
    ip_width: f64,
    n_updates: u64,
    sums: Option<ErrorSums>,
}

impl NtFilter {
    /// `ip_width` is the error-kernel width of the full IP gradient and of
    /// [`NtFilter::window_ip`]; `err_map` is required for
    /// [`NtRule::KmeeEips`] and its width takes precedence there.
    pub fn new(
        rule: NtRule,
        fm: FeatureMap,
        err_map: Option<FeatureMap>,
        eta: f64,
        sigma_c: f64,
        ip_width: f64,
        window: usize,
    ) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::invalid(format!("learning rate must be positive, got {eta}")));
        }
        if !(sigma_c > 0.0 && ip_width > 0.0) {
            return Err(Error::invalid("kernel widths must be positive"));
        }
        if rule.uses_history() && window == 0 {
            return Err(Error::invalid("history window must be at least 1"));
        }
        let d = fm.feature_dim();
        let sums = match rule {
            NtRule::KmeeEips => {
                let em = err_map
                    .as_ref()
                    .ok_or_else(|| Error::invalid("EIPS-error variant needs an error map"))?;
                if em.input_dim() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: em.input_dim(),
                    });
                }
                Some(ErrorSums::new(d, em.feature_dim()))
            }
            _ => None,
        };
        let ip_width = match (rule, &err_map) {
            (NtRule::KmeeEips, Some(em)) => em.sigma(),
            _ => ip_width,
        };
        Ok(Self {
            rule,
            w: vec![0.0; d],
            fm,
            err_map,
            history: VecDeque::new(),
            window: if rule.uses_history() { window } else { 0 },
            eta,
            sigma_c,
            ip_width,
            n_updates: 0,
            sums,
        })
    }

    pub fn rule(&self) -> NtRule {
        self.rule
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.fm
    }

    pub fn history(&self) -> &VecDeque<HistoryEntry> {
        &self.history
    }

    pub fn n_updates(&self) -> u64 {
        self.n_updates
    }

    pub fn input_dim(&self) -> usize {
        self.fm.input_dim()
    }

    pub fn model_size(&self) -> usize {
        self.w.len()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_input(x, self.input_dim(), 0.0)?;
        Ok(dot(&self.w, &self.fm.map(x)?))
    }

    /// Windowed IP of the stored errors, or `None` for rules without history.
    pub fn window_ip(&self) -> Option<f64> {
        if !self.rule.uses_history() {
            return None;
        }
        let e: Vec<f64> = self.history.iter().map(|h| h.e).collect();
        Some(window_ip(&e, self.ip_width))
    }

    pub fn update(&mut self, x: &[f64], y: f64) -> Result<Step> {
        check_input(x, self.input_dim(), y)?;
        let z = self.fm.map(x)?;
        let prediction = dot(&self.w, &z);
        let e = y - prediction;
        let step = Step { prediction, error: e };
        if !e.is_finite() {
            return Err(Error::Numerical("prediction error is not finite".into()));
        }

        match self.rule {
            NtRule::Klms | NtRule::Kmcc => {
                let f = match self.rule {
                    NtRule::Kmcc => gaussian_sq(e * e, self.sigma_c),
                    _ => 1.0,
                };
                let s = self.eta * f * e;
                let w: Vec<f64> = self.w.iter().zip(&z).map(|(w, z)| w + s * z).collect();
                self.commit(w)?;
            }
            NtRule::KmeeSig => {
                let (zs, es) = self.window_refs();
                let g = sig_gradient(&z, e, &zs, &es, self.sigma_c)?;
                let w = self.stepped(&g);
                self.commit(w)?;
                self.push(z, e);
            }
            NtRule::KmeeDirect => {
                let prev = self.push(z, e);
                let (zs, es) = self.window_refs();
                let g = ip_gradient_direct(&zs, &es, self.ip_width)?;
                let w = self.stepped(&g.value);
                if let Err(err) = self.commit(w) {
                    self.pop(prev);
                    return Err(err);
                }
            }
            NtRule::KmeeEips => {
                let em = self.err_map.as_ref().expect("checked at construction");
                let mut ze = em.map(&[e])?;
                let evicted = if self.history.len() == self.window {
                    self.history.front().cloned()
                } else {
                    None
                };
                let before = self.sums.clone();
                let sums = self.sums.as_mut().expect("checked at construction");
                sums.add(&z, e, &ze, 1.0);
                // The removal pass also runs, at weight 0, while the window
                // fills, so every step does the same work.
                match &evicted {
                    Some(old) => {
                        em.map_into(&[old.e], &mut ze)?;
                        sums.add(&old.z, old.e, &ze, -1.0);
                    }
                    None => sums.add(&z, e, &ze, 0.0),
                }
                let l = self.history.len() + usize::from(evicted.is_none());
                let g = if l < 2 {
                    vec![0.0; self.w.len()]
                } else {
                    let s = self.ip_width;
                    sums.gradient(self.w.len(), 2.0 / (s * s * (l * l) as f64))
                };
                let w = self.stepped(&g);
                if let Err(err) = self.commit(w) {
                    self.sums = before;
                    return Err(err);
                }
                self.push(z, e);
            }
        }
        self.n_updates += 1;
        Ok(step)
    }

    fn stepped(&self, g: &[f64]) -> Vec<f64> {
        self.w.iter().zip(g).map(|(w, g)| w + self.eta * g).collect()
    }

    fn commit(&mut self, w: Vec<f64>) -> Result<()> {
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("filter weights diverged".into()));
        }
        self.w = w;
        Ok(())
    }

    fn push(&mut self, z: Vec<f64>, e: f64) -> Option<HistoryEntry> {
        let evicted = if self.history.len() == self.window {
            self.history.pop_front()
        } else {
            None
        };
        self.history.push_back(HistoryEntry { z, e });
        evicted
    }

    fn pop(&mut self, evicted: Option<HistoryEntry>) {
        self.history.pop_back();
        if let Some(h) = evicted {
            self.history.push_front(h);
        }
    }

    fn window_refs(&self) -> (Vec<&[f64]>, Vec<f64>) {
        self.history.iter().map(|h| (h.z.as_slice(), h.e)).unzip()
    }
}
