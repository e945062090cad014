use super::{load_delimited, Dataset, LoadOptions};
use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

/// How to read one of the bundled tables.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPreset {
    pub name: &'static str,
    pub file: &'static str,
    pub options: LoadOptions,
    /// Expected `(N, d)` after loading.
    pub shape: (usize, usize),
}

/// `data/uci` at the workspace root, as seen at build time.
pub fn bundled_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/uci")
}

pub fn presets() -> Vec<DatasetPreset> {
    let drop = |cols: &[&str]| LoadOptions {
        drop_columns: cols.iter().map(|s| s.to_string()).collect(),
        ..LoadOptions::default()
    };
    vec![
        DatasetPreset {
            name: "iris",
            file: "iris.csv",
            options: LoadOptions::default(),
            shape: (150, 4),
        },
        DatasetPreset {
            name: "wine",
            file: "wine.csv",
            options: drop(&["class"]),
            shape: (178, 13),
        },
        DatasetPreset {
            name: "cancer",
            file: "wpbc.csv",
            // Prognostic table: outcome and recurrence time are targets;
            // the four unknown lymph-node counts read as zero.
            options: LoadOptions {
                missing_value: Some(0.0),
                ..drop(&["outcome", "time"])
            },
            shape: (198, 32),
        },
        DatasetPreset {
            name: "yeast",
            file: "yeast.csv",
            options: LoadOptions::default(),
            shape: (1484, 8),
        },
        DatasetPreset {
            name: "abalone",
            file: "abalone.csv",
            options: LoadOptions::default(),
            shape: (4177, 8),
        },
    ]
}

pub fn preset(name: &str) -> Option<DatasetPreset> {
    let name = if name == "wpbc" { "cancer" } else { name };
    presets().into_iter().find(|p| p.name == name)
}

/// Loads a bundled table from `dir` (default [`bundled_data_dir`]).
pub fn load_preset(name: &str, dir: Option<&Path>) -> Result<Dataset> {
    let p = preset(name).ok_or_else(|| Error::invalid(format!("unknown dataset `{name}`")))?;
    let dir = dir.map(Path::to_path_buf).unwrap_or_else(bundled_data_dir);
    let mut ds = load_delimited(dir.join(p.file), &p.options)?;
    ds.name = p.name.to_string();
    if ds.shape() != p.shape {
        return Err(Error::invalid(format!(
            "{}: expected shape {:?}, found {:?}",
            p.name,
            p.shape,
            ds.shape()
        )));
    }
    Ok(ds)
}
