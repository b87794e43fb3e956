//! Command-line driver: JSON configs in, CSV/JSON results and a hashed
//! manifest out.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

use clap::Parser;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use commands::{run_experiment, Experiment, Outcome};
pub use config::{load_config, parse_config, MapDescriptor, RunConfig};
pub use error::{CliError, CliResult};
pub use manifest::{hash_file, RunManifest, MANIFEST_NAME};

#[derive(Debug, Parser)]
#[command(name = "qc-spectra", version, about = "Exponent, pressure and motion experiments for planar quasiconformal maps")]
pub struct Cli {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check an existing run in the output directory (running it first if absent)
    /// against its hashes and a fresh recomputation.
    #[arg(long)]
    pub verify: bool,
    /// Override a top-level scalar config field, e.g. `--set seed=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

fn execute(exp: Experiment, cfg: &RunConfig, echo: &serde_json::Value, dir: &Path) -> CliResult<RunManifest> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let start = Instant::now();
    let outcome = run_experiment(exp, cfg, dir)?;
    let files = outcome
        .files
        .iter()
        .map(|f| hash_file(&dir.join(f)))
        .collect::<CliResult<Vec<_>>>()?;
    let manifest = RunManifest {
        toolkit: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: exp.name().to_string(),
        config: echo.clone(),
        wall_time: start.elapsed().as_secs_f64(),
        summary: outcome.summary,
        files,
    };
    manifest.write(dir)?;
    Ok(manifest)
}

/// Check the files recorded in `dir` against their hashes, then recompute in a
/// scratch directory and compare.
fn verify(exp: Experiment, cfg: &RunConfig, echo: &serde_json::Value, dir: &Path) -> CliResult<RunManifest> {
    let first = RunManifest::read(dir)?;
    let stale = first.stale_files(dir)?;
    if !stale.is_empty() {
        return Err(CliError::Verify(format!("hash mismatch on re-read: {}", stale.join(", "))));
    }
    let scratch = tempfile::tempdir().map_err(|e| CliError::io("creating scratch directory", e))?;
    let second = execute(exp, cfg, echo, scratch.path())?;
    let differ: Vec<String> = first
        .files
        .iter()
        .filter(|f| !second.files.contains(f))
        .map(|f| f.name.clone())
        .collect();
    if !differ.is_empty() || first.files.len() != second.files.len() {
        return Err(CliError::Verify(format!("rerun differs: {}", differ.join(", "))));
    }
    Ok(first)
}

/// Run one CLI invocation inside a pool of the requested size.
pub fn run(cli: &Cli) -> CliResult<RunManifest> {
    let (cfg, echo) = load_config(&cli.config, &cli.overrides)?;
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(cli.experiment.name()));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        if !cli.verify {
            return execute(cli.experiment, &cfg, &echo, &dir);
        }
        if !dir.join(MANIFEST_NAME).exists() {
            execute(cli.experiment, &cfg, &echo, &dir)?;
        }
        verify(cli.experiment, &cfg, &echo, &dir)
    })
}
