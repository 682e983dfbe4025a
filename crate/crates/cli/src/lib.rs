//! Seeded experiment runners behind the `logcave` binary.
//!
//! Every subcommand reads a JSON config, runs deterministically for a given
//! seed and returns a [`ResultRecord`] holding the config echo, named metrics
//! and a CSV table.

pub mod commands;
pub mod record;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

pub use record::{Metric, ResultRecord, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    PolytopeRate,
    Approx,
    Estimate,
    Vc,
    Rate,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Self::PolytopeRate => "polytope-rate",
            Self::Approx => "approx",
            Self::Estimate => "estimate",
            Self::Vc => "vc",
            Self::Rate => "rate",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error(transparent)]
    Library(logcave::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Budget(_) => 3,
            _ => 1,
        }
    }
}

impl From<logcave::Error> for CliError {
    fn from(e: logcave::Error) -> Self {
        use logcave::Error as E;
        match e {
            E::BudgetExhausted(m) => Self::Budget(m),
            E::LowAcceptance { .. } => Self::Budget(e.to_string()),
            E::InvalidParameter(_) | E::DimensionMismatch { .. } | E::NotInterior | E::Unbounded(_) => {
                Self::Config(e.to_string())
            }
            other => Self::Library(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Everything a run depends on; echoed verbatim into its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub subcommand: Subcommand,
    pub seed: u64,
    pub output_path: String,
    pub emit_svg: bool,
    pub params: serde_json::Value,
}

/// Reads the subcommand's JSON config (or `{}`) and resolves the seed: the
/// `--seed` flag wins over a top-level `"seed"` key, and one of them is
/// required.
pub fn load_config(
    subcommand: Subcommand,
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
    emit_svg: bool,
) -> CliResult<ExperimentConfig> {
    let mut params = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<serde_json::Value>(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => serde_json::json!({}),
    };
    let obj = params.as_object_mut().ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
    let file_seed = match obj.remove("seed") {
        Some(v) => Some(v.as_u64().ok_or_else(|| CliError::Config("seed must be a non-negative integer".into()))?),
        None => None,
    };
    let seed = seed.or(file_seed).ok_or_else(|| CliError::Config("a seed is required (--seed or \"seed\")".into()))?;
    Ok(ExperimentConfig {
        subcommand,
        seed,
        output_path: out.display().to_string(),
        emit_svg,
        params,
    })
}

pub(crate) fn parse_params<T: serde::de::DeserializeOwned>(value: &serde_json::Value) -> CliResult<T> {
    serde_json::from_value(value.clone()).map_err(|e| CliError::Config(e.to_string()))
}

/// Runs one experiment.
pub fn run(config: &ExperimentConfig) -> CliResult<ResultRecord> {
    let started = record::unix_millis();
    let (params, table, data) = match config.subcommand {
        Subcommand::PolytopeRate => commands::polytope_rate::run(&config.params, config.seed)?,
        Subcommand::Approx => commands::approx::run(&config.params, config.seed)?,
        Subcommand::Estimate => commands::estimate::run(&config.params, config.seed)?,
        Subcommand::Vc => commands::vc::run(&config.params, config.seed)?,
        Subcommand::Rate => commands::rate::run(&config.params, config.seed)?,
    };
    let mut echo = config.clone();
    echo.params = params;
    let metrics = table.summary.iter().cloned().collect();
    Ok(ResultRecord::new(echo, metrics, table, data, started))
}

/// Writes `<name>.csv`, `<name>.json` and, if requested, `<name>.svg` into
/// the output directory and returns their paths.
pub fn write_outputs(config: &ExperimentConfig, record: &ResultRecord) -> CliResult<Vec<PathBuf>> {
    let dir = Path::new(&config.output_path);
    std::fs::create_dir_all(dir)?;
    let name = config.subcommand.name();
    let csv = record.csv();
    let mut written = Vec::new();
    let csv_path = dir.join(format!("{name}.csv"));
    std::fs::write(&csv_path, &csv)?;
    written.push(csv_path);
    let json_path = dir.join(format!("{name}.json"));
    let json = serde_json::to_string_pretty(record).map_err(|e| CliError::Library(logcave::Error::InvalidParameter(e.to_string())))?;
    std::fs::write(&json_path, json + "\n")?;
    written.push(json_path);
    if config.emit_svg {
        let svg_path = dir.join(format!("{name}.svg"));
        std::fs::write(&svg_path, svg::render(&csv, &commands::plot_spec(config.subcommand)))?;
        written.push(svg_path);
    }
    Ok(written)
}
