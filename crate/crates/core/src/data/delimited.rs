use crate::error::{Error, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    /// `N × d`, one row per sample.
    pub x: Array2<f64>,
    pub columns: Vec<String>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.x.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Delimiter {
    #[default]
    Comma,
    /// Runs of spaces and tabs.
    Whitespace,
    Char(char),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoadOptions {
    pub delimiter: Delimiter,
    pub has_header: bool,
    /// Columns removed before parsing, by header name or zero-based index.
    pub drop_columns: Vec<String>,
    /// Token marking a missing entry.
    pub missing_token: String,
    /// Value substituted for missing entries; `None` makes them an error.
    pub missing_value: Option<f64>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: Delimiter::Comma,
            has_header: true,
            drop_columns: Vec::new(),
            missing_token: "?".into(),
            missing_value: None,
        }
    }
}

/// Reads a delimited numeric table.
///
/// A column whose first data entry does not parse as a number is treated as
/// a label column and dropped with a warning. Any later unparseable entry in
/// a numeric column is an error carrying its line number.
pub fn load_delimited(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_delimited(&text, &name, opts)
}

pub fn parse_delimited(text: &str, name: &str, opts: &LoadOptions) -> Result<Dataset> {
    let split = |line: &str| -> Vec<String> {
        match opts.delimiter {
            Delimiter::Comma => line.split(',').map(|s| s.trim().to_string()).collect(),
            Delimiter::Char(c) => line.split(c).map(|s| s.trim().to_string()).collect(),
            Delimiter::Whitespace => line.split_whitespace().map(str::to_string).collect(),
        }
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let header = if opts.has_header {
        match lines.next() {
            Some((_, l)) => Some(split(l)),
            None => return Err(Error::EmptyInput),
        }
    } else {
        None
    };
    let rows: Vec<(usize, Vec<String>)> = lines.map(|(i, l)| (i, split(l))).collect();
    let Some((_, first)) = rows.first() else {
        return Err(Error::EmptyInput);
    };
    let width = header.as_ref().map_or(first.len(), Vec::len);
    let names: Vec<String> = header.unwrap_or_else(|| (0..width).map(|i| format!("c{i}")).collect());

    for d in &opts.drop_columns {
        let known = names.iter().any(|n| n == d)
            || d.parse::<usize>().is_ok_and(|i| i < width);
        if !known {
            return Err(Error::invalid(format!("no column `{d}` to drop")));
        }
    }
    let dropped = |j: usize| {
        opts.drop_columns
            .iter()
            .any(|d| *d == names[j] || d.parse::<usize>() == Ok(j))
    };
    let is_missing = |s: &str| !opts.missing_token.is_empty() && s == opts.missing_token;

    let mut keep = Vec::new();
    for j in 0..width {
        if dropped(j) {
            continue;
        }
        let cell = first.get(j).map(String::as_str).unwrap_or("");
        if is_missing(cell) || cell.parse::<f64>().is_ok() {
            keep.push(j);
        } else {
            log::warn!("{name}: dropping non-numeric column `{}`", names[j]);
        }
    }
    if keep.is_empty() {
        return Err(Error::invalid(format!("{name}: no numeric columns")));
    }

    let mut values = Vec::with_capacity(rows.len() * keep.len());
    for (line, row) in &rows {
        if row.len() != width {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected {width} fields, found {}", row.len()),
            });
        }
        for &j in &keep {
            let cell = row[j].as_str();
            let v = if is_missing(cell) {
                opts.missing_value.ok_or_else(|| Error::Parse {
                    line: *line,
                    message: format!("missing value in column `{}`", names[j]),
                })?
            } else {
                cell.parse::<f64>().map_err(|_| Error::Parse {
                    line: *line,
                    message: format!("cannot parse `{cell}` in column `{}`", names[j]),
                })?
            };
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("non-finite value in column `{}`", names[j]),
                });
            }
            values.push(v);
        }
    }
    let x = Array2::from_shape_vec((rows.len(), keep.len()), values).expect("row-major fill");
    Ok(Dataset {
        name: name.to_string(),
        x,
        columns: keep.iter().map(|&j| names[j].clone()).collect(),
    })
}
