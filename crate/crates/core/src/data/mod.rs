//! Dataset loading and synthesis.
//!
//! - [`load_delimited`] reads comma or whitespace separated numeric tables.
//! - [`normalize`] z-scores each column and rescales to `[-1, 1]`.
//! - [`mackey_glass`] integrates the Mackey–Glass delay equation.
//! - [`embed`] builds time-delay regressors for one-step prediction.
//! - [`MgProtocol`] draws train/test windows from a long series.
//! - [`presets`] describes the bundled UCI tables under `data/uci`.

mod delimited;
mod mackey_glass;
mod normalize;
mod presets;
mod protocol;

pub use delimited::{load_delimited, parse_delimited, Dataset, Delimiter, LoadOptions};
pub use mackey_glass::{mackey_glass, MackeyGlassParams, TimeSeries};
pub use normalize::{normalize, standardize_series, MaxAbsScaling, NormalizeOptions, StdConvention};
pub use presets::{bundled_data_dir, load_preset, preset, presets, DatasetPreset};
pub use protocol::{embed, MgData, MgProtocol, MgSplit};

#[cfg(test)]
mod tests;
