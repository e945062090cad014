use crate::args::{Format, GenMgArgs};
use anyhow::{Context, Result};
use eips_itl::data::{mackey_glass, MackeyGlassParams, StdConvention};
use std::io::Write;

pub fn run(a: GenMgArgs) -> Result<()> {
    let params = MackeyGlassParams {
        beta: a.beta,
        gamma: a.gamma,
        tau: a.tau,
        n: a.n,
        dt: a.dt,
        h: a.h,
        x0: a.x0,
        burn_in: a.burn_in,
    };
    let mut ts = mackey_glass(a.samples, &params)?;
    if !a.raw {
        ts = ts.standardize(StdConvention::Population)?;
    }
    let out = &a.output;
    match (out.format, &out.out) {
        // Files get the sidecar so `kaf --series` can read them back.
        (Format::Csv | Format::Table, Some(path)) => {
            ts.write_csv(path).with_context(|| format!("writing {}", path.display()))?;
        }
        (Format::Json, Some(path)) => {
            let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            serde_json::to_writer(std::io::BufWriter::new(f), &ts)?;
        }
        (Format::Json, None) => {
            let mut w = std::io::stdout().lock();
            serde_json::to_writer(&mut w, &ts)?;
            writeln!(w)?;
        }
        (Format::Csv | Format::Table, _) => {
            let mut w = std::io::BufWriter::new(std::io::stdout().lock());
            writeln!(w, "value")?;
            for v in &ts.values {
                writeln!(w, "{v:?}")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
