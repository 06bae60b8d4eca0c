//! Subcommand implementations. Each writes its artifacts into the output
//! directory and returns their file names for the manifest.

use std::fs;
use std::path::Path;

use serde::Serialize;

use rips_euler::cloud::{sample_poisson, PointCloud};
use rips_euler::harness::{run_fclt, run_moment_asymptotics, run_palm_check, run_slln, PalmConfig};
use rips_euler::limits::{
    build_covariance_grid, gp_increment_check, gp_sample, limit_mean, psi, write_psi_csv,
    GPPath, PsiParams, SeriesOptions,
};
use rips_euler::rips::{euler_curve, RipsOptions};
use rips_euler::rng::mix_seed;
use rips_euler::ScalingContext;

use crate::config::RunConfig;
use crate::CliError;

pub struct CommandOutcome {
    pub artifacts: Vec<String>,
    pub exit_code: i32,
}

fn ok(artifacts: Vec<String>) -> CommandOutcome {
    CommandOutcome { artifacts, exit_code: 0 }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(dir.join(name), bytes)
        .map_err(|e| CliError::Validation(format!("cannot write {name}: {e}")))
}

fn series_options(cfg: &RunConfig) -> SeriesOptions {
    SeriesOptions::new(cfg.campaign.epsilon, cfg.campaign.mc_samples, cfg.seeds.base)
}

pub fn cmd_sample(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let model = cfg.density_model()?;
    let ctx = ScalingContext::new(cfg.scaling.n, model.dimension)
        .map_err(CliError::from_validation)?;
    let cloud = sample_poisson(&model, ctx, cfg.seeds.base).map_err(CliError::from_core)?;
    let mut buf = Vec::new();
    cloud.write_csv(&mut buf).map_err(CliError::from_core)?;
    write_file(out, "cloud.csv", &buf)?;
    Ok(ok(vec!["cloud.csv".into()]))
}

fn read_cloud_csv(path: &str, ctx: ScalingContext) -> Result<PointCloud, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read cloud csv {path}: {e}")))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Validation("empty cloud csv".into()))?;
    let dim = header.split(',').count();
    if dim != ctx.dim {
        return Err(CliError::Validation(format!(
            "cloud csv has {dim} columns but the configured dimension is {}",
            ctx.dim
        )));
    }
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let coords: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let coords = coords.map_err(|e| {
            CliError::Validation(format!("cloud csv line {}: {e}", lineno + 2))
        })?;
        if coords.len() != dim {
            return Err(CliError::Validation(format!(
                "cloud csv line {} has {} columns, expected {dim}",
                lineno + 2,
                coords.len()
            )));
        }
        points.push(coords);
    }
    PointCloud::from_points(points, ctx, 0).map_err(CliError::from_validation)
}

pub fn cmd_euler_curve(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let model = cfg.density_model()?;
    let region = cfg.region_spec()?;
    let ctx = ScalingContext::new(cfg.scaling.n, model.dimension)
        .map_err(CliError::from_validation)?;
    let cloud = match cfg.euler_curve.as_ref().and_then(|s| s.cloud_csv.as_ref()) {
        Some(path) => read_cloud_csv(path, ctx)?,
        None => sample_poisson(&model, ctx, cfg.seeds.base).map_err(CliError::from_core)?,
    };
    let opts = RipsOptions {
        dim_cap: cfg.campaign.dim_cap,
        budget: cfg.campaign.clique_budget,
    };
    let curve =
        euler_curve(&cloud, cfg.t_max()?, &region, &opts).map_err(CliError::from_core)?;
    let mut buf = Vec::new();
    curve.write_csv(&mut buf).map_err(CliError::from_core)?;
    write_file(out, "euler_curve.csv", &buf)?;
    write_file(out, "euler_curve.json", &json_bytes(&curve))?;
    Ok(ok(vec!["euler_curve.csv".into(), "euler_curve.json".into()]))
}

pub fn cmd_psi(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let section = cfg
        .psi
        .as_ref()
        .ok_or_else(|| CliError::Validation("psi command needs a [psi] section".into()))?;
    let model = cfg.density_model()?;
    let region = cfg.region_spec()?;
    let params = PsiParams {
        j: section.j,
        k1: section.k1,
        k2: section.k2,
        t: section.t,
        s: section.s,
    };
    let est = psi(&params, &model, &region, cfg.campaign.mc_samples, cfg.seeds.base)
        .map_err(CliError::from_core)?;
    let mut buf = Vec::new();
    write_psi_csv(&[(params, est)], &mut buf).map_err(CliError::from_core)?;
    write_file(out, "psi.csv", &buf)?;
    Ok(ok(vec!["psi.csv".into()]))
}

#[derive(Serialize)]
struct LimitMeanArtifact {
    t: f64,
    value: f64,
    std_error: f64,
    truncation: rips_euler::limits::SeriesTruncation,
}

pub fn cmd_limit_mean(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let section = cfg.limit_mean.as_ref().ok_or_else(|| {
        CliError::Validation("limit-mean command needs a [limit_mean] section".into())
    })?;
    let model = cfg.density_model()?;
    let region = cfg.region_spec()?;
    let (val, trunc) = limit_mean(section.t, &model, &region, &series_options(cfg))
        .map_err(CliError::from_core)?;
    let artifact = LimitMeanArtifact {
        t: section.t,
        value: val.value,
        std_error: val.std_error,
        truncation: trunc,
    };
    write_file(out, "limit_mean.json", &json_bytes(&artifact))?;
    Ok(ok(vec!["limit_mean.json".into()]))
}

pub fn cmd_covariance(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let model = cfg.density_model()?;
    let region = cfg.region_spec()?;
    let grid = build_covariance_grid(&cfg.grid.t_values, &model, &region, &series_options(cfg))
        .map_err(CliError::from_core)?;
    write_file(out, "covariance.json", &json_bytes(&grid))?;
    Ok(ok(vec!["covariance.json".into()]))
}

#[derive(Serialize)]
struct GpArtifact {
    grid: rips_euler::limits::CovarianceGrid,
    paths: Vec<GPPath>,
    increment_report: rips_euler::limits::IncrementReport,
}

pub fn cmd_gp_sample(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let model = cfg.density_model()?;
    let region = cfg.region_spec()?;
    let grid = build_covariance_grid(&cfg.grid.t_values, &model, &region, &series_options(cfg))
        .map_err(CliError::from_core)?;
    let n_paths = cfg.gp.as_ref().map(|g| g.paths).unwrap_or(1);
    let paths: Result<Vec<GPPath>, _> = (0..n_paths)
        .map(|i| gp_sample(&grid, mix_seed(cfg.seeds.base, i as u64)))
        .collect();
    let paths = paths.map_err(CliError::from_core)?;
    let mut buf = Vec::new();
    {
        use std::io::Write;
        writeln!(buf, "path,t,value").map_err(|e| CliError::Validation(e.to_string()))?;
        for (i, p) in paths.iter().enumerate() {
            for (t, v) in p.t_grid.iter().zip(&p.values) {
                writeln!(buf, "{i},{t},{v}").map_err(|e| CliError::Validation(e.to_string()))?;
            }
        }
    }
    write_file(out, "gp_paths.csv", &buf)?;
    let artifact = GpArtifact {
        increment_report: gp_increment_check(&grid),
        grid,
        paths,
    };
    write_file(out, "gp_sample.json", &json_bytes(&artifact))?;
    Ok(ok(vec!["gp_paths.csv".into(), "gp_sample.json".into()]))
}

fn campaign_outcome(
    report: rips_euler::harness::ExperimentReport,
    out: &Path,
) -> Result<CommandOutcome, CliError> {
    let mut csv = Vec::new();
    report.write_csv(&mut csv).map_err(CliError::from_core)?;
    write_file(out, "report.csv", &csv)?;
    write_file(out, "report.json", &report.to_json_bytes())?;
    Ok(CommandOutcome {
        artifacts: vec!["report.csv".into(), "report.json".into()],
        exit_code: if report.passed { 0 } else { 3 },
    })
}

pub fn cmd_slln(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let campaign = cfg.campaign_config()?;
    campaign_outcome(run_slln(&campaign).map_err(CliError::from_core)?, out)
}

pub fn cmd_fclt(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let campaign = cfg.campaign_config()?;
    campaign_outcome(run_fclt(&campaign).map_err(CliError::from_core)?, out)
}

pub fn cmd_moments(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let campaign = cfg.campaign_config()?;
    campaign_outcome(run_moment_asymptotics(&campaign).map_err(CliError::from_core)?, out)
}

pub fn cmd_palm_check(cfg: &RunConfig, out: &Path) -> Result<CommandOutcome, CliError> {
    let section = cfg
        .palm
        .as_ref()
        .ok_or_else(|| CliError::Validation("palm-check command needs a [palm] section".into()))?;
    let model = cfg.density_model()?;
    let palm = PalmConfig {
        model,
        n: section.n.unwrap_or(cfg.scaling.n),
        k: section.k,
        radius: section.radius,
        replications: section.replications.unwrap_or(cfg.campaign.replications),
        mc_samples: section.mc_samples.unwrap_or(cfg.campaign.mc_samples),
        base_seed: cfg.seeds.base,
        clique_budget: cfg.campaign.clique_budget,
        check_pairs: section.check_pairs.unwrap_or(false),
    };
    campaign_outcome(run_palm_check(&palm).map_err(CliError::from_core)?, out)
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("artifact serialization");
    bytes.push(b'\n');
    bytes
}
