use super::Dataset;
use crate::error::{Error, Result};
use ndarray::Axis;
use serde::{Deserialize, Serialize};

/// Divisor of the z-score standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StdConvention {
    /// Divide by N.
    #[default]
    Population,
    /// Divide by N - 1.
    Sample,
}

/// How the z-scored table is brought into `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaxAbsScaling {
    /// One divisor for the whole table: its largest absolute entry.
    #[default]
    Global,
    /// Each column by its own largest absolute entry.
    PerColumn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizeOptions {
    pub scaling: MaxAbsScaling,
    pub std: StdConvention,
}

/// Per-column z-score followed by max-abs rescaling.
///
/// With [`MaxAbsScaling::Global`] the table's extreme value lands on ±1 and
/// every column keeps mean 0 and a common standard deviation. Columns with
/// zero variance are rejected by name.
pub fn normalize(ds: &Dataset, opts: &NormalizeOptions) -> Result<Dataset> {
    if ds.n() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut x = ds.x.clone();
    for (j, mut col) in x.axis_iter_mut(Axis(1)).enumerate() {
        let name = ds.columns.get(j).cloned().unwrap_or_else(|| format!("c{j}"));
        let (mean, sd) = mean_std(col.iter().copied(), col.len(), opts.std);
        if degenerate(mean, sd) {
            return Err(Error::ZeroVariance(name));
        }
        col.mapv_inplace(|v| (v - mean) / sd);
        if opts.scaling == MaxAbsScaling::PerColumn {
            let m = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            col.mapv_inplace(|v| v / m);
        }
    }
    if opts.scaling == MaxAbsScaling::Global {
        let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        x.mapv_inplace(|v| v / m);
    }
    Ok(Dataset {
        name: ds.name.clone(),
        x,
        columns: ds.columns.clone(),
    })
}

/// Single-series version of [`normalize`]: subtract the mean, divide by the
/// standard deviation, then by the largest absolute value.
pub fn standardize_series(series: &[f64], std: StdConvention) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (mean, sd) = mean_std(series.iter().copied(), series.len(), std);
    if degenerate(mean, sd) {
        return Err(Error::ZeroVariance("series".into()));
    }
    let z: Vec<f64> = series.iter().map(|v| (v - mean) / sd).collect();
    let m = z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(z.into_iter().map(|v| v / m).collect())
}

/// Constant up to rounding in the mean.
fn degenerate(mean: f64, sd: f64) -> bool {
    !(sd > 64.0 * f64::EPSILON * mean.abs().max(f64::MIN_POSITIVE))
}

fn mean_std(values: impl Iterator<Item = f64> + Clone, n: usize, conv: StdConvention) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    let denom = match conv {
        StdConvention::Population => nf,
        StdConvention::Sample => (nf - 1.0).max(1.0),
    };
    (mean, (ss / denom).sqrt())
}
