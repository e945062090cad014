use super::{map_spec, mean};
use crate::args::{BackendKind, DelimiterKind, EstimateArgs, MapKind, Scaling, StdKind};
use crate::output::{write_rows, ExperimentRecord, RECORD_HEADER};
use crate::usage;
use anyhow::{Context, Result};
use eips_itl::data::{
    load_delimited, load_preset, normalize, preset, Dataset, Delimiter, LoadOptions, MaxAbsScaling,
    NormalizeOptions, StdConvention,
};
use eips_itl::icd::IcdOptions;
use eips_itl::itl::{accumulate_pairs, Backend, Estimator, KernelWidths};
use eips_itl::MapSpec;
use std::path::Path;

fn load(name: &str, a: &EstimateArgs) -> Result<Dataset> {
    let path = Path::new(name);
    if preset(name).is_some() && !path.exists() {
        return load_preset(name, a.data_dir.as_deref()).with_context(|| format!("loading dataset `{name}`"));
    }
    if !path.exists() {
        return Err(usage(format!("`{name}` is neither a bundled dataset nor an existing file")));
    }
    let opts = LoadOptions {
        delimiter: match a.delimiter {
            DelimiterKind::Comma => Delimiter::Comma,
            DelimiterKind::Whitespace => Delimiter::Whitespace,
        },
        has_header: !a.no_header,
        drop_columns: a.drop_columns.clone(),
        ..LoadOptions::default()
    };
    load_delimited(path, &opts).with_context(|| format!("loading {}", path.display()))
}

/// Backend configurations to run, each with its method label.
fn backends(a: &EstimateArgs, trial_seed: u64) -> Vec<(String, Backend)> {
    let mut out = Vec::new();
    for kind in &a.backend {
        match kind {
            BackendKind::Direct => out.push(("direct".to_string(), Backend::Direct)),
            BackendKind::Icd => {
                let options = IcdOptions {
                    epsilon: a.epsilon,
                    max_rank: a.max_rank,
                    rule: a.icd_rule,
                };
                out.push((format!("icd(eps={:e})", a.epsilon), Backend::Icd { options }));
            }
            BackendKind::Eips => {
                let specs: Vec<MapSpec> = match a.map {
                    MapKind::Taylor => a.degree.iter().map(|&r| map_spec(a.map, r, 0, trial_seed)).collect(),
                    MapKind::Gq => a
                        .degree
                        .iter()
                        .flat_map(|&r| a.features.iter().map(move |&f| map_spec(a.map, r, f, trial_seed)))
                        .collect(),
                    MapKind::RffPaired | MapKind::RffShifted => {
                        a.features.iter().map(|&f| map_spec(a.map, 0, f, trial_seed)).collect()
                    }
                };
                for map in specs {
                    out.push((format!("eips:{}", map.label()), Backend::Eips { map }));
                }
            }
        }
    }
    out
}

struct Cell {
    value: f64,
    cpu: f64,
    rank: Option<f64>,
    feature_dim: Option<usize>,
}

pub fn run(a: EstimateArgs) -> Result<()> {
    if a.dataset.is_empty() {
        return Err(usage("estimate needs --dataset"));
    }
    if !(a.sigma > 0.0 && a.sigma.is_finite()) {
        return Err(usage(format!("--sigma must be positive, got {}", a.sigma)));
    }
    let norm = NormalizeOptions {
        scaling: match a.scaling {
            Scaling::Global => MaxAbsScaling::Global,
            Scaling::PerColumn => MaxAbsScaling::PerColumn,
        },
        std: match a.std {
            StdKind::Population => StdConvention::Population,
            StdKind::Sample => StdConvention::Sample,
        },
    };
    let widths = KernelWidths::from_sigma(a.sigma);

    let mut rows = Vec::new();
    for name in &a.dataset {
        let ds = normalize(&load(name, &a)?, &norm)?;
        log::info!("{}: {} samples, {} features", ds.name, ds.n(), ds.dim());
        let n_configs = backends(&a, a.seed).len();
        let mut cells: Vec<Vec<Cell>> = (0..n_configs).map(|_| Vec::new()).collect();
        let mut labels = Vec::new();
        for trial in 0..a.trials {
            let configs = backends(&a, a.seed + trial as u64);
            labels = configs.iter().map(|(l, _)| l.clone()).collect();
            for (k, (label, backend)) in configs.into_iter().enumerate() {
                let est = Estimator::with_widths(backend, widths)?;
                let feature_dim = est.prepare(a.descriptor, 1, 1)?.feature_dim();
                let s = accumulate_pairs(&est, a.descriptor, ds.x.view())
                    .with_context(|| format!("{} on {}", label, ds.name))?;
                let cpu = s.cpu_seconds + if a.include_setup { s.setup_seconds } else { 0.0 };
                log::debug!("{} {label} trial {trial}: {} over {} pairs", ds.name, s.value, s.pairs);
                cells[k].push(Cell {
                    value: s.value,
                    cpu,
                    rank: s.mean_rank,
                    feature_dim,
                });
            }
        }

        for (label, runs) in labels.iter().zip(&cells) {
            let mut emit = |trial: String, c: &Cell| {
                let size = c.rank.or(c.feature_dim.map(|d| d as f64));
                let rec = |metric: &str, value: f64| ExperimentRecord {
                    experiment: ds.name.clone(),
                    method: label.clone(),
                    trial: trial.clone(),
                    iteration: 0,
                    metric: metric.to_string(),
                    value,
                    cpu_seconds: c.cpu,
                    model_size: size,
                };
                rows.push(rec(a.descriptor.name(), c.value));
                if let Some(r) = c.rank {
                    rows.push(rec("rank", r));
                }
            };
            if a.per_trial {
                for (t, c) in runs.iter().enumerate() {
                    emit(t.to_string(), c);
                }
            }
            let field = |f: fn(&Cell) -> f64| mean(&runs.iter().map(f).collect::<Vec<_>>());
            let avg = Cell {
                value: field(|c| c.value),
                cpu: field(|c| c.cpu),
                rank: runs[0].rank.map(|_| field(|c| c.rank.unwrap_or(0.0))),
                feature_dim: runs[0].feature_dim,
            };
            emit("mean".to_string(), &avg);
        }
    }
    write_rows(&a.output, &RECORD_HEADER, &rows)
}
