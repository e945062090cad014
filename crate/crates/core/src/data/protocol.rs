use super::{mackey_glass, standardize_series, MackeyGlassParams, StdConvention};
use crate::error::{Error, Result};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Time-delay embedding: row `i` is `(s_i, …, s_{i+d-1})`, target
/// `s_{i+d-1+horizon}`.
pub fn embed(series: &[f64], d: usize, horizon: usize) -> Result<(Array2<f64>, Vec<f64>)> {
    if d == 0 || horizon == 0 {
        return Err(Error::invalid("embedding dimension and horizon must be at least 1"));
    }
    if series.len() < d + horizon {
        return Err(Error::invalid(format!(
            "series of length {} too short for d = {d}, horizon = {horizon}",
            series.len()
        )));
    }
    let m = series.len() - d - horizon + 1;
    let x = Array2::from_shape_fn((m, d), |(i, j)| series[i + j]);
    let y = (0..m).map(|i| series[i + d - 1 + horizon]).collect();
    Ok((x, y))
}

/// Train/test windows for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct MgSplit {
    pub start: usize,
    pub train_x: Array2<f64>,
    pub train_y: Vec<f64>,
    pub test_x: Array2<f64>,
    pub test_y: Vec<f64>,
}

/// One long standardized series, embedded once; each trial takes a
/// training span at a random start and the test span right after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MgProtocol {
    pub series_len: usize,
    pub train: usize,
    pub test: usize,
    pub embed_dim: usize,
    pub horizon: usize,
    pub params: MackeyGlassParams,
}

impl Default for MgProtocol {
    fn default() -> Self {
        Self {
            series_len: 20_000,
            train: 2000,
            test: 200,
            embed_dim: 7,
            horizon: 1,
            params: MackeyGlassParams::default(),
        }
    }
}

/// The generated, standardized and embedded series behind an [`MgProtocol`].
#[derive(Debug, Clone)]
pub struct MgData {
    x: Array2<f64>,
    y: Vec<f64>,
    train: usize,
    test: usize,
}

impl MgProtocol {
    pub fn generate(&self) -> Result<MgData> {
        let raw = mackey_glass(self.series_len, &self.params)?;
        let s = standardize_series(&raw.values, StdConvention::Population)?;
        self.from_series(&s)
    }

    /// Embeds an already prepared series; `series_len` and `params` are
    /// ignored.
    pub fn from_series(&self, series: &[f64]) -> Result<MgData> {
        let (x, y) = embed(series, self.embed_dim, self.horizon)?;
        if self.train == 0 {
            return Err(Error::invalid("training span must be at least 1"));
        }
        if x.nrows() < self.train + self.test {
            return Err(Error::invalid(format!(
                "series yields {} samples, fewer than train + test = {}",
                x.nrows(),
                self.train + self.test
            )));
        }
        Ok(MgData {
            x,
            y,
            train: self.train,
            test: self.test,
        })
    }
}

impl MgData {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Window for the trial seeded with `seed` (conventionally base seed +
    /// trial index).
    pub fn split(&self, seed: u64) -> MgSplit {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let last = self.len() - self.train - self.test;
        let start = rng.random_range(0..=last);
        self.split_at(start)
    }

    pub fn split_at(&self, start: usize) -> MgSplit {
        let mid = start + self.train;
        let end = mid + self.test;
        let rows = |a: usize, b: usize| self.x.slice(ndarray::s![a..b, ..]).to_owned();
        MgSplit {
            start,
            train_x: rows(start, mid),
            train_y: self.y[start..mid].to_vec(),
            test_x: rows(mid, end),
            test_y: self.y[mid..end].to_vec(),
        }
    }
}
