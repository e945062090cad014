use crate::args::{BackendKind, BenchArgs};
use crate::output::{write_rows, BenchRecord, BENCH_HEADER};
use crate::usage;
use anyhow::Result;
use eips_itl::icd::IcdOptions;
use eips_itl::itl::{Backend, Descriptor, Estimator};
use eips_itl::timing::thread_cpu_time;
use eips_itl::MapSpec;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Two equal Gaussian components at ±0.5 with standard deviation 0.2.
fn mixture(n: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.2).expect("valid normal");
    Array2::from_shape_simple_fn((n, 1), || {
        let mu = if rng.random_bool(0.5) { 0.5 } else { -0.5 };
        mu + noise.sample(&mut rng)
    })
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn run(a: BenchArgs) -> Result<()> {
    if a.repeats == 0 {
        return Err(usage("--repeats must be at least 1"));
    }
    let mut rows = Vec::new();
    for &n in &a.sizes {
        let x = mixture(n, a.seed);
        for kind in &a.backend {
            let (name, backend) = match kind {
                BackendKind::Direct => ("direct", Backend::Direct),
                BackendKind::Icd => ("icd", Backend::Icd {
                    options: IcdOptions::with_epsilon(a.epsilon),
                }),
                BackendKind::Eips => ("eips", Backend::Eips {
                    map: MapSpec::Taylor { degree: a.degree },
                }),
            };
            let est = Estimator::new(backend, a.sigma)?;
            let prepared = est.prepare(Descriptor::Ip, 1, 1)?;
            let mut times = Vec::with_capacity(a.repeats);
            let mut last = None;
            for _ in 0..a.repeats {
                let t0 = thread_cpu_time();
                let ev = prepared.evaluate(x.view(), None)?;
                times.push((thread_cpu_time() - t0).as_secs_f64());
                last = Some(ev);
            }
            let ev = last.expect("at least one repeat");
            times.sort_by(f64::total_cmp);
            let size = prepared
                .feature_dim()
                .or(ev.rank.map(|r| r.round() as usize));
            log::info!("{name} N={n}: median {:.3e} s", quantile(&times, 0.5));
            rows.push(BenchRecord {
                backend: name.to_string(),
                n,
                repeats: a.repeats,
                median_seconds: quantile(&times, 0.5),
                iqr_seconds: quantile(&times, 0.75) - quantile(&times, 0.25),
                ip: ev.value,
                model_size: size,
            });
        }
    }
    write_rows(&a.output, &BENCH_HEADER, &rows)
}
