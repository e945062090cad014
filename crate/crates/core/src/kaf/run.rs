use super::Filter;
use crate::data::MgSplit;
use crate::error::{Error, Result};
use crate::timing::thread_cpu_time;
use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

pub fn test_mse(filter: &Filter, x: ArrayView2<f64>, y: &[f64]) -> Result<f64> {
    if x.nrows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.nrows(),
            right: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut buf = vec![0.0; x.ncols()];
    let mut acc = 0.0;
    for (row, &t) in x.rows().into_iter().zip(y) {
        for (b, v) in buf.iter_mut().zip(row.iter()) {
            *b = *v;
        }
        let e = t - filter.predict(&buf)?;
        acc += e * e;
    }
    Ok(acc / y.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOptions {
    /// Evaluate on the test span every this many updates (and after the last).
    pub eval_every: usize,
    /// Keep the CPU time of every single update.
    pub step_times: bool,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            eval_every: 10,
            step_times: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Updates performed so far; 0 is the untrained filter.
    pub iteration: usize,
    pub test_mse: f64,
    pub window_ip: Option<f64>,
    /// Thread CPU time spent in updates so far.
    pub cpu_seconds: f64,
    pub model_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub points: Vec<CurvePoint>,
    /// Per-update CPU seconds, when requested.
    pub step_times: Vec<f64>,
}

impl TrialResult {
    pub fn last(&self) -> Option<&CurvePoint> {
        self.points.last()
    }
}

/// Trains `filter` on the split's training span in order, recording a
/// learning curve. Only the updates are timed.
pub fn run_trial(filter: &mut Filter, split: &MgSplit, opts: &TrialOptions) -> Result<TrialResult> {
    if opts.eval_every == 0 {
        return Err(Error::invalid("eval_every must be at least 1"));
    }
    let n = split.train_y.len();
    let mut points = Vec::with_capacity(n / opts.eval_every + 2);
    let mut step_times = Vec::with_capacity(if opts.step_times { n } else { 0 });
    let mut spent = 0.0;
    let mut record = |f: &Filter, it: usize, spent: f64| -> Result<()> {
        points.push(CurvePoint {
            iteration: it,
            test_mse: test_mse(f, split.test_x.view(), &split.test_y)?,
            window_ip: f.window_ip(),
            cpu_seconds: spent,
            model_size: f.model_size(),
        });
        Ok(())
    };
    record(filter, 0, spent)?;
    let mut buf = vec![0.0; split.train_x.ncols()];
    for (i, (row, &y)) in split.train_x.rows().into_iter().zip(&split.train_y).enumerate() {
        for (b, v) in buf.iter_mut().zip(row.iter()) {
            *b = *v;
        }
        let t0 = thread_cpu_time();
        filter.update(&buf, y)?;
        let dt = (thread_cpu_time() - t0).as_secs_f64();
        spent += dt;
        if opts.step_times {
            step_times.push(dt);
        }
        let it = i + 1;
        if it % opts.eval_every == 0 || it == n {
            record(filter, it, spent)?;
        }
    }
    Ok(TrialResult { points, step_times })
}
