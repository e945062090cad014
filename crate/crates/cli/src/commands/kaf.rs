use super::{map_spec, mean};
use crate::args::KafArgs;
use crate::output::{write_rows, ExperimentRecord, RECORD_HEADER};
use crate::usage;
use anyhow::{Context, Result};
use eips_itl::data::{MackeyGlassParams, MgData, MgProtocol, StdConvention, TimeSeries};
use eips_itl::kaf::{run_trial, Algorithm, FilterConfig, TrialOptions, TrialResult};
use rayon::prelude::*;

fn protocol(a: &KafArgs) -> MgProtocol {
    MgProtocol {
        series_len: a.series_len,
        train: a.train,
        test: a.test,
        embed_dim: a.embed,
        horizon: a.horizon,
        params: MackeyGlassParams {
            burn_in: a.burn_in,
            ..MackeyGlassParams::default()
        },
    }
}

fn load_data(a: &KafArgs) -> Result<MgData> {
    let p = protocol(a);
    match &a.series {
        Some(path) => {
            let mut ts = TimeSeries::read_csv(path).with_context(|| format!("reading series {}", path.display()))?;
            if !ts.standardized {
                ts = ts.standardize(StdConvention::Population)?;
            }
            Ok(p.from_series(&ts.values)?)
        }
        None => Ok(p.generate()?),
    }
}

fn filter_config(a: &KafArgs, algorithm: Algorithm, seed: u64) -> FilterConfig {
    FilterConfig {
        algorithm,
        eta: a.eta,
        sigma: a.sigma,
        sigma_c: a.sigma_c,
        ip_width: a.ip_width,
        window: a.window,
        q_factor: a.q_factor,
        map: map_spec(a.map, a.degree, a.features, seed),
        error_degree: a.error_degree,
    }
}

fn run_one(a: &KafArgs, data: &MgData, algorithm: Algorithm, trial: usize) -> Result<TrialResult> {
    let seed = a.seed + trial as u64;
    let mut filter = filter_config(a, algorithm, seed).build(a.embed)?;
    let split = data.split(seed);
    let opts = TrialOptions {
        eval_every: a.eval_every,
        step_times: false,
    };
    let res = run_trial(&mut filter, &split, &opts).with_context(|| format!("{algorithm}, trial {trial}"))?;
    if let Some(dir) = &a.save_state {
        let path = dir.join(format!("{algorithm}-trial{trial}.json"));
        std::fs::write(&path, filter.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    }
    log::info!(
        "{algorithm} trial {trial}: final test MSE {:.4e}",
        res.last().map_or(f64::NAN, |p| p.test_mse)
    );
    Ok(res)
}

fn records(algorithm: Algorithm, trial: &str, res: &TrialResult) -> Vec<ExperimentRecord> {
    let mut out = Vec::new();
    for p in &res.points {
        let rec = |metric: &str, value: f64| ExperimentRecord {
            experiment: "mackey-glass".to_string(),
            method: algorithm.to_string(),
            trial: trial.to_string(),
            iteration: p.iteration,
            metric: metric.to_string(),
            value,
            cpu_seconds: p.cpu_seconds,
            model_size: Some(p.model_size as f64),
        };
        out.push(rec("test-mse", p.test_mse));
        if let Some(ip) = p.window_ip {
            out.push(rec("ip", ip));
        }
    }
    out
}

/// Pointwise mean over trials. Every trial records the same iterations.
fn mean_records(algorithm: Algorithm, runs: &[TrialResult]) -> Vec<ExperimentRecord> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (k, p) in first.points.iter().enumerate() {
        let col = |f: &dyn Fn(&eips_itl::kaf::CurvePoint) -> f64| {
            mean(&runs.iter().map(|r| f(&r.points[k])).collect::<Vec<_>>())
        };
        let cpu = col(&|q| q.cpu_seconds);
        let size = col(&|q| q.model_size as f64);
        let rec = |metric: &str, value: f64| ExperimentRecord {
            experiment: "mackey-glass".to_string(),
            method: algorithm.to_string(),
            trial: "mean".to_string(),
            iteration: p.iteration,
            metric: metric.to_string(),
            value,
            cpu_seconds: cpu,
            model_size: Some(size),
        };
        out.push(rec("test-mse", col(&|q| q.test_mse)));
        if p.window_ip.is_some() {
            out.push(rec("ip", col(&|q| q.window_ip.unwrap_or(f64::NAN))));
        }
    }
    out
}

pub fn run(a: KafArgs) -> Result<()> {
    if a.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    if let Some(dir) = &a.save_state {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    // Configuration errors surface before any data is generated.
    for &alg in &a.algorithm {
        filter_config(&a, alg, a.seed).build(a.embed)?;
    }

    let mut rows = Vec::new();
    if a.trials > 0 {
        let data = load_data(&a)?;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(a.threads).build()?;
        for &alg in &a.algorithm {
            let runs: Vec<TrialResult> = pool.install(|| {
                (0..a.trials)
                    .into_par_iter()
                    .map(|t| run_one(&a, &data, alg, t))
                    .collect::<Result<_>>()
            })?;
            if a.per_trial {
                for (t, r) in runs.iter().enumerate() {
                    rows.extend(records(alg, &t.to_string(), r));
                }
            }
            rows.extend(mean_records(alg, &runs));
        }
    }
    write_rows(&a.output, &RECORD_HEADER, &rows)
}
