//! Run configuration: a strict TOML document plus command-line overrides.
//!
//! Unknown keys are rejected everywhere, and every effective value (after
//! overrides) lands in the run manifest, so a run can be reproduced from its
//! artifacts alone.

use serde::{Deserialize, Serialize};

use rips_euler::harness::CampaignConfig;
use rips_euler::rips::DEFAULT_CLIQUE_BUDGET;
use rips_euler::{DensityModel, RegionSpec};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub density: DensitySection,
    pub scaling: ScalingSection,
    pub grid: GridSection,
    #[serde(default)]
    pub region: Option<RegionSection>,
    #[serde(default)]
    pub campaign: CampaignSection,
    #[serde(default)]
    pub seeds: SeedsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub euler_curve: Option<EulerCurveSection>,
    #[serde(default)]
    pub psi: Option<PsiSection>,
    #[serde(default)]
    pub limit_mean: Option<LimitMeanSection>,
    #[serde(default)]
    pub gp: Option<GpSection>,
    #[serde(default)]
    pub palm: Option<PalmSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub kind: String,
    pub dimension: usize,
    #[serde(default)]
    pub side: Option<f64>,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    #[serde(default)]
    pub mean: Option<Vec<f64>>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub box_lo: Option<Vec<f64>>,
    #[serde(default)]
    pub box_hi: Option<Vec<f64>>,
    #[serde(default)]
    pub cells: Option<Vec<usize>>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    pub n: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_values: Vec<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub kind: String,
    #[serde(default)]
    pub lo: Option<Vec<f64>>,
    #[serde(default)]
    pub hi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub n_values: Option<Vec<f64>>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default)]
    pub dim_cap: Option<usize>,
    #[serde(default = "default_true")]
    pub require_exact: bool,
    #[serde(default = "default_budget")]
    pub clique_budget: u64,
}

fn default_replications() -> usize {
    200
}
fn default_epsilon() -> f64 {
    1e-4
}
fn default_mc_samples() -> u64 {
    100_000
}
fn default_true() -> bool {
    true
}
fn default_budget() -> u64 {
    DEFAULT_CLIQUE_BUDGET
}

impl Default for CampaignSection {
    fn default() -> Self {
        Self {
            replications: default_replications(),
            n_values: None,
            epsilon: default_epsilon(),
            mc_samples: default_mc_samples(),
            dim_cap: None,
            require_exact: true,
            clique_budget: default_budget(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedsSection {
    #[serde(default)]
    pub base: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerCurveSection {
    /// Optional fixture cloud (CSV with header `x0..x{d-1}`); sampled from
    /// the density when absent.
    #[serde(default)]
    pub cloud_csv: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSection {
    pub j: usize,
    pub k1: usize,
    pub k2: usize,
    pub t: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitMeanSection {
    pub t: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpSection {
    #[serde(default = "default_paths")]
    pub paths: usize,
}

fn default_paths() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PalmSection {
    pub k: usize,
    pub radius: f64,
    #[serde(default)]
    pub n: Option<f64>,
    #[serde(default)]
    pub replications: Option<usize>,
    #[serde(default)]
    pub mc_samples: Option<u64>,
    #[serde(default)]
    pub check_pairs: Option<bool>,
}

/// Command-line overrides; they beat file values, and the manifest records
/// the result.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub replications: Option<usize>,
    pub dim_cap: Option<usize>,
    pub out_dir: Option<String>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        Ok(cfg)
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) {
        if let Some(seed) = ov.seed {
            self.seeds.base = seed;
        }
        if let Some(eps) = ov.epsilon {
            self.campaign.epsilon = eps;
        }
        if let Some(reps) = ov.replications {
            self.campaign.replications = reps;
        }
        if let Some(cap) = ov.dim_cap {
            self.campaign.dim_cap = Some(cap);
        }
        if let Some(dir) = &ov.out_dir {
            self.output.dir = Some(dir.clone());
        }
    }

    pub fn density_model(&self) -> Result<DensityModel, CliError> {
        let d = &self.density;
        let model = match d.kind.as_str() {
            "uniform-cube" => DensityModel::uniform_cube(
                d.dimension,
                d.side
                    .ok_or_else(|| CliError::Validation("uniform-cube needs `side`".into()))?,
                d.center
                    .clone()
                    .ok_or_else(|| CliError::Validation("uniform-cube needs `center`".into()))?,
            ),
            "truncated-gaussian" => DensityModel::truncated_gaussian(
                d.dimension,
                d.mean
                    .clone()
                    .ok_or_else(|| CliError::Validation("truncated-gaussian needs `mean`".into()))?,
                d.sigma
                    .ok_or_else(|| CliError::Validation("truncated-gaussian needs `sigma`".into()))?,
                d.box_lo
                    .clone()
                    .ok_or_else(|| CliError::Validation("truncated-gaussian needs `box_lo`".into()))?,
                d.box_hi
                    .clone()
                    .ok_or_else(|| CliError::Validation("truncated-gaussian needs `box_hi`".into()))?,
            ),
            "piecewise-constant" => DensityModel::piecewise_constant(
                d.dimension,
                d.box_lo
                    .clone()
                    .ok_or_else(|| CliError::Validation("piecewise-constant needs `box_lo`".into()))?,
                d.box_hi
                    .clone()
                    .ok_or_else(|| CliError::Validation("piecewise-constant needs `box_hi`".into()))?,
                d.cells
                    .clone()
                    .ok_or_else(|| CliError::Validation("piecewise-constant needs `cells`".into()))?,
                d.weights
                    .clone()
                    .ok_or_else(|| CliError::Validation("piecewise-constant needs `weights`".into()))?,
            ),
            other => {
                return Err(CliError::Validation(format!("unknown density kind `{other}`")))
            }
        };
        model.map_err(CliError::from_validation)
    }

    pub fn region_spec(&self) -> Result<RegionSpec, CliError> {
        match &self.region {
            None => Ok(RegionSpec::AllSpace),
            Some(r) => match r.kind.as_str() {
                "all-space" => Ok(RegionSpec::AllSpace),
                "box" => {
                    let lo = r
                        .lo
                        .clone()
                        .ok_or_else(|| CliError::Validation("box region needs `lo`".into()))?;
                    let hi = r
                        .hi
                        .clone()
                        .ok_or_else(|| CliError::Validation("box region needs `hi`".into()))?;
                    RegionSpec::bounded_box(lo, hi).map_err(CliError::from_validation)
                }
                other => Err(CliError::Validation(format!("unknown region kind `{other}`"))),
            },
        }
    }

    pub fn t_max(&self) -> Result<f64, CliError> {
        match self.grid.t_max {
            Some(t) => Ok(t),
            None => self
                .grid
                .t_values
                .last()
                .copied()
                .ok_or_else(|| CliError::Validation("grid.t_values must be nonempty".into())),
        }
    }

    pub fn campaign_config(&self) -> Result<CampaignConfig, CliError> {
        let model = self.density_model()?;
        let region = self.region_spec()?;
        if !(self.scaling.n >= 0.0) || !self.scaling.n.is_finite() {
            return Err(CliError::Validation(format!(
                "scaling.n must be finite and nonnegative, got {}",
                self.scaling.n
            )));
        }
        let n_values = self
            .campaign
            .n_values
            .clone()
            .unwrap_or_else(|| vec![self.scaling.n]);
        let cfg = CampaignConfig {
            model,
            n_values,
            t_grid: self.grid.t_values.clone(),
            replications: self.campaign.replications,
            base_seed: self.seeds.base,
            epsilon: self.campaign.epsilon,
            mc_samples: self.campaign.mc_samples,
            region,
            dim_cap: self.campaign.dim_cap,
            require_exact: self.campaign.require_exact,
            clique_budget: self.campaign.clique_budget,
        };
        cfg.validate().map_err(CliError::from_validation)?;
        Ok(cfg)
    }

    /// Canonical JSON of the effective configuration.
    pub fn canonical_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialization")
    }
}
