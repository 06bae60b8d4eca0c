//! Command-line surface for Euler characteristic process simulations.
//!
//! Every subcommand reads a strict TOML configuration, applies command-line
//! overrides, runs one module operation, and writes its artifacts plus a run
//! manifest (effective config, config hash, seeds, versions, wall time) into
//! the output directory.
//!
//! Exit codes: 0 success, 2 validation error, 3 acceptance-gate failure,
//! 4 computational guard trip (clique budget, series cap, factorization).

mod commands;
mod config;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use config::{Overrides, RunConfig};

/// Env var giving the default output root.
const OUTPUT_ENV: &str = "RIPS_EULER_OUT";

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or unusable inputs (exit 2).
    Validation(String),
    /// A computational guard tripped (exit 4).
    Guard(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Guard(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Guard(m) => m,
        }
    }

    /// Core errors from computation: guard trips keep their own exit code.
    pub fn from_core(e: rips_euler::Error) -> Self {
        if e.is_guard_trip() {
            CliError::Guard(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }

    /// Core errors raised while validating configuration.
    pub fn from_validation(e: rips_euler::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "rips-euler",
    version,
    about = "Euler characteristic processes of Vietoris-Rips filtrations: simulation, limit formulas, verification campaigns"
)]
struct Cli {
    /// Path to the TOML run configuration.
    #[arg(long, global = true, default_value = "run.toml")]
    config: PathBuf,

    /// Output directory (beats `output.dir` and the RIPS_EULER_OUT env var).
    #[arg(long, global = true)]
    out: Option<String>,

    /// Base seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Series truncation budget override.
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Replication count override.
    #[arg(long, global = true)]
    reps: Option<usize>,

    /// Dimension cap override for clique enumeration.
    #[arg(long, global = true)]
    dim_cap: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sample a Poisson cloud and write it as CSV.
    Sample,
    /// Compute the exact Euler characteristic curve of one cloud.
    EulerCurve,
    /// Evaluate a single psi functional.
    Psi,
    /// Evaluate the limiting mean with its truncation record.
    LimitMean,
    /// Assemble the limit covariance on the configured time grid.
    Covariance,
    /// Draw limit Gaussian process paths and run the increment check.
    GpSample,
    /// Strong-law verification campaign.
    Slln,
    /// Central-limit verification campaign.
    Fclt,
    /// Palm-identity verification.
    PalmCheck,
    /// Moment-asymptotics trace across intensities.
    Moments,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::EulerCurve => "euler-curve",
            Command::Psi => "psi",
            Command::LimitMean => "limit-mean",
            Command::Covariance => "covariance",
            Command::GpSample => "gp-sample",
            Command::Slln => "slln",
            Command::Fclt => "fclt",
            Command::PalmCheck => "palm-check",
            Command::Moments => "moments",
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config_hash: String,
    effective_config: serde_json::Value,
    seed: u64,
    versions: BTreeMap<String, String>,
    wall_time_seconds: f64,
    artifacts: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Validation(format!("cannot configure {jobs} jobs: {e}")))?;
    }
    let text = fs::read_to_string(&cli.config).map_err(|e| {
        CliError::Validation(format!("cannot read config {}: {e}", cli.config.display()))
    })?;
    let mut cfg = RunConfig::from_toml(&text)?;
    let overrides = Overrides {
        seed: cli.seed,
        epsilon: cli.eps,
        replications: cli.reps,
        dim_cap: cli.dim_cap,
        out_dir: cli.out.clone(),
    };
    cfg.apply_overrides(&overrides);

    let out_dir = cfg
        .output
        .dir
        .clone()
        .or_else(|| std::env::var(OUTPUT_ENV).ok())
        .unwrap_or_else(|| ".".into());
    let out = PathBuf::from(out_dir);
    fs::create_dir_all(&out)
        .map_err(|e| CliError::Validation(format!("cannot create output dir: {e}")))?;

    let started = Instant::now();
    let outcome = match cli.command {
        Command::Sample => commands::cmd_sample(&cfg, &out)?,
        Command::EulerCurve => commands::cmd_euler_curve(&cfg, &out)?,
        Command::Psi => commands::cmd_psi(&cfg, &out)?,
        Command::LimitMean => commands::cmd_limit_mean(&cfg, &out)?,
        Command::Covariance => commands::cmd_covariance(&cfg, &out)?,
        Command::GpSample => commands::cmd_gp_sample(&cfg, &out)?,
        Command::Slln => commands::cmd_slln(&cfg, &out)?,
        Command::Fclt => commands::cmd_fclt(&cfg, &out)?,
        Command::PalmCheck => commands::cmd_palm_check(&cfg, &out)?,
        Command::Moments => commands::cmd_moments(&cfg, &out)?,
    };

    let effective_config = cfg.canonical_json();
    let hash_input = serde_json::to_vec(&effective_config).expect("config hash input");
    let digest = Sha256::digest(&hash_input);
    let config_hash: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let mut versions = BTreeMap::new();
    versions.insert("rips-euler-cli".to_string(), env!("CARGO_PKG_VERSION").to_string());
    versions.insert("rips-euler".to_string(), rips_euler::VERSION.to_string());
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        config_hash,
        effective_config,
        seed: cfg.seeds.base,
        versions,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        artifacts: outcome.artifacts,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serialization");
    bytes.push(b'\n');
    fs::write(out.join("manifest.json"), bytes)
        .map_err(|e| CliError::Validation(format!("cannot write manifest: {e}")))?;

    Ok(outcome.exit_code as u8)
}
