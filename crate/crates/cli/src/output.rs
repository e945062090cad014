use crate::args::{Format, Output};
use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};

/// One row of `estimate` or `kaf` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub method: String,
    /// Trial index, or `mean` for the trial average.
    pub trial: String,
    pub iteration: usize,
    pub metric: String,
    pub value: f64,
    pub cpu_seconds: f64,
    pub model_size: Option<f64>,
}

pub const RECORD_HEADER: [&str; 8] = [
    "experiment",
    "method",
    "trial",
    "iteration",
    "metric",
    "value",
    "cpu_seconds",
    "model_size",
];

impl ExperimentRecord {
    fn fields(&self) -> Vec<String> {
        vec![
            self.experiment.clone(),
            self.method.clone(),
            self.trial.clone(),
            self.iteration.to_string(),
            self.metric.clone(),
            fmt_f64(self.value),
            fmt_f64(self.cpu_seconds),
            self.model_size.map(fmt_f64).unwrap_or_default(),
        ]
    }
}

/// Row of `bench` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub backend: String,
    pub n: usize,
    pub repeats: usize,
    pub median_seconds: f64,
    pub iqr_seconds: f64,
    pub ip: f64,
    pub model_size: Option<usize>,
}

pub const BENCH_HEADER: [&str; 7] = [
    "backend",
    "n",
    "repeats",
    "median_seconds",
    "iqr_seconds",
    "ip",
    "model_size",
];

impl BenchRecord {
    fn fields(&self) -> Vec<String> {
        vec![
            self.backend.clone(),
            self.n.to_string(),
            self.repeats.to_string(),
            fmt_f64(self.median_seconds),
            fmt_f64(self.iqr_seconds),
            fmt_f64(self.ip),
            self.model_size.map(|m| m.to_string()).unwrap_or_default(),
        ]
    }
}

/// Shortest representation that parses back to the same value.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

pub trait Row: Serialize {
    fn cells(&self) -> Vec<String>;
}

impl Row for ExperimentRecord {
    fn cells(&self) -> Vec<String> {
        self.fields()
    }
}

impl Row for BenchRecord {
    fn cells(&self) -> Vec<String> {
        self.fields()
    }
}

fn sink(out: &Output) -> Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `rows` in the requested format. CSV always gets its header, so an
/// empty result is still a valid table.
pub fn write_rows<R: Row>(out: &Output, header: &[&str], rows: &[R]) -> Result<()> {
    let mut w = sink(out)?;
    match out.format {
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(header)?;
            for r in rows {
                c.write_record(r.cells())?;
            }
            c.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
        }
        Format::Table => write_table(&mut w, header, rows)?,
    }
    w.flush()?;
    Ok(())
}

fn write_table<R: Row>(w: &mut dyn Write, header: &[&str], rows: &[R]) -> io::Result<()> {
    let cells: Vec<Vec<String>> = rows.iter().map(Row::cells).collect();
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in &cells {
        for (k, c) in r.iter().enumerate() {
            width[k] = width[k].max(c.len());
        }
    }
    let line = |w: &mut dyn Write, r: &[String]| -> io::Result<()> {
        let padded: Vec<String> = r
            .iter()
            .zip(&width)
            .map(|(c, &n)| format!("{c:<n$}"))
            .collect();
        writeln!(w, "{}", padded.join("  ").trim_end())
    };
    let head: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    line(w, &head)?;
    let rule: Vec<String> = width.iter().map(|&n| "-".repeat(n)).collect();
    line(w, &rule)?;
    for r in &cells {
        line(w, r)?;
    }
    Ok(())
}
