//! Library side of the `rabisqueeze` command-line tool.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::Path;

use config::{Experiment, ExperimentConfig};
use error::{CliError, CliResult};
use output::Format;

/// Loads the config, runs the experiment and writes the dataset.
pub fn execute(
    experiment: Experiment,
    config: Option<&Path>,
    overrides: &[String],
    out: &Path,
    format: Format,
) -> CliResult<()> {
    let text = match config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })?),
        None => None,
    };
    let name = config.map(|p| p.display().to_string()).unwrap_or_default();
    let cfg = ExperimentConfig::load(experiment, text.as_deref().map(|t| (name.as_str(), t)), overrides)?;
    let data = experiments::run(&cfg)?;
    let bytes = match format {
        Format::Csv => output::to_csv(&data).map_err(|e| CliError::Io {
            path: out.into(),
            source: e.into(),
        })?,
        Format::Json => output::to_json(&data),
    };
    std::fs::write(out, bytes).map_err(|source| CliError::Io {
        path: out.into(),
        source,
    })
}
