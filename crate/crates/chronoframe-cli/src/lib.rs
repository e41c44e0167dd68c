//! Scenario runner behind the `chronoframe` binary.

pub mod config;
pub mod experiments;
pub mod output;

use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

pub use config::{load_config, parse_config, ScenarioConfig};
pub use experiments::{PointOutput, Record};
pub use output::Format;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{field}: {value} is not on the clock grid")]
    OffGridTime { field: String, value: f64 },
    #[error("{field}: reading {value} is closer than {gap} to the wrap-around of the clock")]
    GuardGap { field: String, value: f64, gap: f64 },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("scenario `{scenario}` at {point}: {source}")]
    Engine {
        scenario: String,
        point: String,
        #[source]
        source: chronoframe::Error,
    },
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for anything the scenario file can fix, 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use chronoframe::Error as E;
        match self {
            RunError::Config(_) => 2,
            RunError::Io(_) => 1,
            RunError::Engine { source, .. } => match source {
                E::DegenerateNormalization { .. } | E::NotPositive(_) | E::NoPhysicalStates(_) => 1,
                _ => 2,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum CheckLevel {
    #[default]
    Fast,
    /// Adds the constraint-path and group-average cross-checks per point.
    Full,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub format: Format,
    pub clock_dim: Option<usize>,
    pub seed: u64,
    pub check_level: CheckLevel,
    /// Worker threads; `None` reads `CHRONOFRAME_THREADS` and falls back to rayon's default.
    pub threads: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { format: Format::Csv, clock_dim: None, seed: 0, check_level: CheckLevel::Fast, threads: None }
    }
}

fn threads_from_env() -> Result<Option<usize>, ConfigError> {
    match std::env::var("CHRONOFRAME_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => v.trim().parse::<usize>().ok().filter(|n| *n > 0).map(Some).ok_or_else(|| ConfigError::Invalid {
            field: "CHRONOFRAME_THREADS".into(),
            message: format!("`{v}` is not a positive integer"),
        }),
    }
}

/// Expands the sweep, validates every point, then evaluates the points in
/// parallel. Results keep sweep order.
pub fn run_points(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Vec<PointOutput>, RunError> {
    let mut base = cfg.clone();
    if let Some(d) = opts.clock_dim {
        base.set_clock_dim(d);
    }
    let points = base
        .sweep_points()?
        .into_iter()
        .map(|v| {
            let c = base.at_point(v)?;
            c.validate()?;
            Ok((v, c))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    let threads = match opts.threads {
        Some(n) => Some(n),
        None => threads_from_env()?,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| ConfigError::Invalid { field: "threads".into(), message: e.to_string() })?;
    let mut outs = pool.install(|| {
        points
            .par_iter()
            .map(|(v, c)| {
                experiments::run_point(c, opts).map_err(|source| RunError::Engine {
                    scenario: cfg.name.clone(),
                    point: match v {
                        Some(x) => format!("{} = {x}", c.experiment.sweep_parameter().as_str()),
                        None => "the single point".into(),
                    },
                    source,
                })
            })
            .collect::<Result<Vec<_>, RunError>>()
    })?;
    experiments::finish(cfg.experiment, &mut outs);
    Ok(outs)
}

/// Runs a scenario and writes it. Returns whether every embedded check passed.
pub fn run(cfg: &ScenarioConfig, opts: &RunOptions, sink: &mut dyn Write) -> Result<bool, RunError> {
    let outs = run_points(cfg, opts)?;
    output::write(cfg.experiment, &outs, opts.format, sink)?;
    Ok(outs.iter().all(|o| o.record.passed))
}
