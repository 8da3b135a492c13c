//! Scenario parsing, grid sweeps and dataset output for `linklab`.

pub mod config;
pub mod errata;
pub mod output;
pub mod sweep;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{parse_config, SweepSpec};
pub use sweep::{run_sweep, RunOptions, SweepOutput};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at line {line}, key `{key}`: {message}")]
    Config { key: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown preset `{0}` (fig2 ... fig8)")]
    UnknownPreset(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub const PRESET_NAMES: [&str; 7] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

pub fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2" => include_str!("../presets/fig2.toml"),
        "fig3" => include_str!("../presets/fig3.toml"),
        "fig4" => include_str!("../presets/fig4.toml"),
        "fig5" => include_str!("../presets/fig5.toml"),
        "fig6" => include_str!("../presets/fig6.toml"),
        "fig7" => include_str!("../presets/fig7.toml"),
        "fig8" => include_str!("../presets/fig8.toml"),
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<SweepSpec, CliError> {
    let text = preset_text(name).ok_or_else(|| CliError::UnknownPreset(name.to_string()))?;
    parse_config(text)
}

/// Files written by [`execute`].
#[derive(Debug)]
pub struct Report {
    pub csv: PathBuf,
    pub output: SweepOutput,
}

/// Runs `spec`, writes `<out>/<name>.csv` and appends to `<out>/errata.log`.
/// Failed grid points are left out of the CSV and listed in the report.
pub fn execute(spec: &SweepSpec, name: &str, out: &Path, opts: RunOptions) -> Result<Report, CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let output = run_sweep(spec, opts);
    let csv = out.join(format!("{name}.csv"));
    output::emit_csv(&output.curves, &csv).map_err(|e| CliError::io(&csv, e))?;
    if !output.errata.is_empty() {
        errata::append(out, &output.errata).map_err(|e| CliError::io(&out.join(errata::ERRATA_FILE), e))?;
    }
    Ok(Report { csv, output })
}
