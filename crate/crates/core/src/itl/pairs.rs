use super::{Descriptor, Estimator};
use crate::error::{Error, Result};
use crate::timing::thread_cpu_time;
use ndarray::{ArrayView2, Axis};
use serde::{Deserialize, Serialize};

/// A descriptor accumulated over the feature pairs of one table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    /// Sum of the descriptor over all pairs.
    pub value: f64,
    /// Thread CPU time of the evaluations.
    pub cpu_seconds: f64,
    /// Thread CPU time of the one-off setup (feature-map construction).
    pub setup_seconds: f64,
    /// Mean factor rank, incomplete-Cholesky backend only.
    pub mean_rank: Option<f64>,
    pub pairs: usize,
}

/// Evaluates `descriptor` on every column pair `(i, j)`, `i < j`, of `data`
/// and sums the values. Single-variable descriptors (IP, entropy) run once
/// per column instead.
pub fn accumulate_pairs(est: &Estimator, descriptor: Descriptor, data: ArrayView2<f64>) -> Result<PairSummary> {
    let d = data.ncols();
    let t0 = thread_cpu_time();
    let prepared = est.prepare(descriptor, 1, 1)?;
    let setup_seconds = (thread_cpu_time() - t0).as_secs_f64();

    let jobs: Vec<(usize, Option<usize>)> = if descriptor.needs_y() {
        (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, Some(j)))).collect()
    } else {
        (0..d).map(|i| (i, None)).collect()
    };
    if jobs.is_empty() {
        return Err(Error::invalid(format!(
            "`{descriptor}` needs at least two columns, table has {d}"
        )));
    }
    let col = |k: usize| data.column(k).insert_axis(Axis(1));

    let mut value = 0.0;
    let mut ranks = Vec::new();
    let t0 = thread_cpu_time();
    for &(i, j) in &jobs {
        let ev = prepared.evaluate(col(i), j.map(col))?;
        value += ev.value;
        ranks.extend(ev.rank);
    }
    let cpu_seconds = (thread_cpu_time() - t0).as_secs_f64();
    let mean_rank = (!ranks.is_empty()).then(|| ranks.iter().sum::<f64>() / ranks.len() as f64);
    Ok(PairSummary {
        value,
        cpu_seconds,
        setup_seconds,
        mean_rank,
        pairs: jobs.len(),
    })
}
