//! TOML run manifests: one optional section per subcommand, unknown keys
//! rejected, relative paths resolved against the manifest's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub fit: Option<FitSection>,
    pub path: Option<PathSection>,
    pub simulate: Option<SimulateSection>,
    pub benchmark: Option<BenchmarkSection>,
    pub track: Option<TrackSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Lasso,
    Marginal,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub data: PathBuf,
    #[serde(default = "default_method")]
    pub method: String,
    pub lambda1: Option<f64>,
    #[serde(default)]
    pub lambda2: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "initial_lasso")]
    pub initial: InitialKind,
    /// Noise level for the initial lasso; estimated when absent.
    pub sigma: Option<f64>,
    /// Support budget read off the path instead of a fixed λ₁.
    pub k: Option<usize>,
    #[serde(default)]
    pub standardize: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSection {
    pub data: PathBuf,
    #[serde(default = "lasso_method")]
    pub method: String,
    #[serde(default)]
    pub lambda2: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "initial_lasso")]
    pub initial: InitialKind,
    pub sigma: Option<f64>,
    pub max_support: Option<usize>,
    #[serde(default)]
    pub standardize: bool,
}

/// Simulation tuning shared by every method.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningSection {
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "default_lambda2_grid")]
    pub lambda2_grid: Vec<f64>,
    #[serde(default = "one")]
    pub lambda1_scale: f64,
    #[serde(default = "half")]
    pub adaptive_lambda1_scale: f64,
    #[serde(default = "initial_lasso")]
    pub initial: InitialKind,
}

impl Default for TuningSection {
    fn default() -> Self {
        let t = ssls::simlab::Tuning::default();
        TuningSection {
            gamma: t.gamma,
            lambda2_grid: t.lambda2_grid,
            lambda1_scale: t.lambda1_scale,
            adaptive_lambda1_scale: t.adaptive_lambda1_scale,
            initial: InitialKind::Lasso,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Consistency,
    Decay,
    Normality,
    Figure1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalityTargetKind {
    Ssls,
    AdaptiveElasticNet,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub n: usize,
    pub p: usize,
    /// Leading true coefficients; the rest are zero.
    pub beta: Vec<f64>,
    pub sigma: f64,
    #[serde(default = "identity")]
    pub covariance: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub experiment: Experiment,
    pub n: usize,
    pub p: usize,
    pub beta: Vec<f64>,
    pub sigma: f64,
    #[serde(default = "identity")]
    pub covariance: String,
    pub replications: usize,
    pub seed: Option<u64>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default = "aen_method")]
    pub method: String,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default = "normality_ssls")]
    pub target: NormalityTargetKind,
    /// Ridge penalty and weight exponent of the figure paths.
    #[serde(default = "thousand")]
    pub path_lambda2: f64,
    #[serde(default = "one")]
    pub path_gamma: f64,
    #[serde(default)]
    pub tuning: TuningSection,
}

impl SimulateSection {
    pub fn design(&self) -> DesignSection {
        DesignSection {
            n: self.n,
            p: self.p,
            beta: self.beta.clone(),
            sigma: self.sigma,
            covariance: self.covariance.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSection {
    pub replications: usize,
    pub seed: Option<u64>,
    pub methods: Option<Vec<String>>,
    #[serde(default)]
    pub tuning: TuningSection,
    pub designs: Vec<DesignSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSection {
    #[serde(default = "default_t")]
    pub t: usize,
    #[serde(default = "hundred")]
    pub p: usize,
    #[serde(default = "twenty")]
    pub holdings: usize,
    pub noise_sd: f64,
    #[serde(default = "market_vol")]
    pub market_vol: f64,
    #[serde(default = "idio_vol")]
    pub idio_vol: f64,
    #[serde(default = "buy_and_hold")]
    pub rule: String,
    /// Number of independent panels; reports gain a leading `panel` column
    /// when larger than one.
    #[serde(default = "one_usize")]
    pub panels: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackSection {
    pub panel: Option<PathBuf>,
    pub synthetic: Option<SyntheticSection>,
    pub seed: Option<u64>,
    #[serde(default = "default_k_list")]
    pub k_list: Vec<usize>,
    #[serde(default = "default_track_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_n_train")]
    pub n_train: usize,
    #[serde(default = "twenty")]
    pub n_test: usize,
    pub stride: Option<usize>,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub lambda2: f64,
    #[serde(default = "prices")]
    pub regress_on: String,
    #[serde(default = "path_initial")]
    pub initial: String,
}

fn default_method() -> String {
    "ssls".into()
}
fn lasso_method() -> String {
    "lasso".into()
}
fn aen_method() -> String {
    "adaptive_elastic_net".into()
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn thousand() -> f64 {
    1000.0
}
fn one_usize() -> usize {
    1
}
fn twenty() -> usize {
    20
}
fn hundred() -> usize {
    100
}
fn default_t() -> usize {
    508
}
fn default_n_train() -> usize {
    98
}
fn market_vol() -> f64 {
    0.01
}
fn idio_vol() -> f64 {
    0.015
}
fn initial_lasso() -> InitialKind {
    InitialKind::Lasso
}
fn normality_ssls() -> NormalityTargetKind {
    NormalityTargetKind::Ssls
}
fn identity() -> String {
    "identity".into()
}
fn buy_and_hold() -> String {
    "buy_and_hold".into()
}
fn prices() -> String {
    "prices".into()
}
fn path_initial() -> String {
    "path:3".into()
}
fn default_lambda2_grid() -> Vec<f64> {
    ssls::simlab::Tuning::default().lambda2_grid
}
fn default_k_list() -> Vec<usize> {
    vec![20, 30, 50]
}
fn default_track_methods() -> Vec<String> {
    vec!["ssls".into(), "lasso".into()]
}

impl RunConfig {
    /// Parses `path` and resolves every file reference relative to it.
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(d) = cfg.out_dir.as_mut() {
            resolve(d);
        }
        if let Some(f) = cfg.fit.as_mut() {
            resolve(&mut f.data);
        }
        if let Some(p) = cfg.path.as_mut() {
            resolve(&mut p.data);
        }
        if let Some(t) = cfg.track.as_mut() {
            if let Some(p) = t.panel.as_mut() {
                resolve(p);
            }
        }
        Ok(cfg)
    }
}

/// Fails unless `path` names an existing regular file.
pub fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::MissingInput {
            path: path.to_path_buf(),
        })
    }
}
