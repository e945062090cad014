use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

/// Parameters of `dx/dt = β x(t-τ) / (1 + x(t-τ)ⁿ) - γ x(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MackeyGlassParams {
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
    pub n: f64,
    /// Sampling period of the emitted series.
    pub dt: f64,
    /// Internal RK4 step; `dt` must be a whole multiple of it.
    pub h: f64,
    /// Initial value and constant history for `t ≤ 0`.
    pub x0: f64,
    /// Emitted samples discarded before the returned series starts.
    pub burn_in: usize,
}

impl Default for MackeyGlassParams {
    fn default() -> Self {
        Self {
            beta: 0.2,
            gamma: 0.1,
            tau: 30.0,
            n: 10.0,
            dt: 6.0,
            h: 0.1,
            x0: 0.9,
            burn_in: 1000,
        }
    }
}

impl MackeyGlassParams {
    fn validate(&self) -> Result<(usize, f64)> {
        for (name, v) in [("beta", self.beta), ("gamma", self.gamma), ("n", self.n), ("x0", self.x0)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::invalid("integration step h must be positive"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("sampling period dt must be positive"));
        }
        let ratio = self.dt / self.h;
        let sub = ratio.round();
        if sub < 1.0 || (ratio - sub).abs() > 1e-9 * ratio {
            return Err(Error::invalid(format!(
                "dt = {} is not a whole multiple of the integration step h = {}",
                self.dt, self.h
            )));
        }
        if !(self.tau >= self.h && self.tau.is_finite()) {
            return Err(Error::invalid(
                "delay tau must be at least one integration step, so delayed stage values are already known",
            ));
        }
        Ok((sub as usize, self.tau / self.h))
    }
}

/// A uniformly sampled series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<MackeyGlassParams>,
    /// Values were z-scored and max-abs scaled after generation.
    #[serde(default)]
    pub standardized: bool,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    len: usize,
    dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<MackeyGlassParams>,
    #[serde(default)]
    standardized: bool,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The same series z-scored and scaled into `[-1, 1]`.
    pub fn standardize(&self, std: super::StdConvention) -> Result<Self> {
        Ok(Self {
            values: super::standardize_series(&self.values, std)?,
            dt: self.dt,
            params: self.params,
            standardized: true,
        })
    }

    /// `path` + `.json`.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    }

    /// Single-column CSV (header `value`) plus a JSON sidecar with `dt` and
    /// the generator parameters.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "value")?;
        for v in &self.values {
            writeln!(w, "{v:?}")?;
        }
        w.flush()?;
        let side = Sidecar {
            len: self.values.len(),
            dt: self.dt,
            params: self.params,
            standardized: self.standardized,
        };
        std::fs::write(Self::sidecar_path(path), serde_json::to_string_pretty(&side)? + "\n")?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(Self::sidecar_path(path))?)?;
        let r = BufReader::new(std::fs::File::open(path)?);
        let mut values = Vec::with_capacity(side.len);
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            values.push(line.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?);
        }
        if values.len() != side.len {
            return Err(Error::LengthMismatch {
                left: side.len,
                right: values.len(),
            });
        }
        Ok(Self {
            values,
            dt: side.dt,
            params: side.params,
            standardized: side.standardized,
        })
    }
}

/// Integrates the delay equation with classical RK4 at step `h`.
///
/// History before `t = 0` is the constant `x0`; delayed values at stage times
/// are linear interpolations of the fine-grid solution. Samples are taken
/// every `dt` starting at `t = 0`, and the first `burn_in` of them dropped.
pub fn mackey_glass(n_samples: usize, p: &MackeyGlassParams) -> Result<TimeSeries> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be at least 1"));
    }
    let (sub, lag) = p.validate()?;
    // Ring of fine-grid values x_k = x(k h); enough to reach back τ + h.
    let cap = lag.ceil() as usize + 3;
    let mut ring = vec![p.x0; cap];
    let at = |ring: &[f64], k: usize| ring[k % cap];

    let delayed = |ring: &[f64], k: usize, offset: f64| -> f64 {
        // x(k h + offset·h - τ)
        let s = k as f64 + offset - lag;
        if s <= 0.0 {
            return p.x0;
        }
        let i = s.floor();
        let frac = s - i;
        let i = i as usize;
        if frac == 0.0 {
            at(ring, i)
        } else {
            at(ring, i) * (1.0 - frac) + at(ring, i + 1) * frac
        }
    };
    let f = |x: f64, xd: f64| p.beta * xd / (1.0 + xd.abs().powf(p.n)) - p.gamma * x;

    let total = p.burn_in + n_samples;
    let mut values = Vec::with_capacity(n_samples);
    let mut x = p.x0;
    let mut k = 0usize;
    for m in 0..total {
        if m > 0 {
            for _ in 0..sub {
                let d0 = delayed(&ring, k, 0.0);
                let dh = delayed(&ring, k, 0.5);
                let d1 = delayed(&ring, k, 1.0);
                let h = p.h;
                let k1 = f(x, d0);
                let k2 = f(x + 0.5 * h * k1, dh);
                let k3 = f(x + 0.5 * h * k2, dh);
                let k4 = f(x + h * k3, d1);
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if !x.is_finite() {
                    return Err(Error::Numerical("Mackey-Glass integration diverged".into()));
                }
                k += 1;
                ring[k % cap] = x;
            }
        }
        if m >= p.burn_in {
            values.push(x);
        }
    }
    Ok(TimeSeries {
        values,
        dt: p.dt,
        params: Some(*p),
        standardized: false,
    })
}
