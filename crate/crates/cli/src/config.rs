use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use turnpoint::potentials::PotentialSpec;
use turnpoint::schrodinger::SolverConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Grushin model parameters: d1 copies of |t|^{2σ}(1 + ε cos log|t|).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d1: usize,
    pub d2: usize,
    pub sigma: f64,
    #[serde(default)]
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub oscillator_rel: f64,
    pub feynman_hellmann: f64,
    pub virial_oscillator: f64,
    pub covariance_rel: f64,
    pub olver_ratio_band: (f64, f64),
    pub j_halving: f64,
    pub cache_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            oscillator_rel: 1e-6,
            feynman_hellmann: 1e-3,
            virial_oscillator: 1e-6,
            covariance_rel: 1e-5,
            olver_ratio_band: (0.35, 0.65),
            j_halving: 0.01,
            cache_rel: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub potentials: Vec<PotentialSpec>,
    #[serde(default = "default_xi")]
    pub xi_grid: Vec<f64>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_lambda")]
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma_grid: Vec<f64>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default = "default_alphas")]
    pub olver_alphas: Vec<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_xi() -> Vec<f64> {
    vec![1.0]
}
fn default_n_max() -> usize {
    20
}
fn default_lambda() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}
fn default_gamma() -> Vec<f64> {
    vec![0.0]
}
fn default_out() -> PathBuf {
    PathBuf::from("turnpoint-out")
}
fn default_alphas() -> Vec<f64> {
    vec![32.0, 64.0, 128.0]
}

impl SuiteConfig {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        let cfg: SuiteConfig = parsed.map_err(|msg| ConfigError::Parse { path: path.into(), msg })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.potentials.is_empty() {
            return bad("potentials list is empty".into());
        }
        for (name, g) in [("xi_grid", &self.xi_grid), ("lambda_grid", &self.lambda_grid), ("olver_alphas", &self.olver_alphas)] {
            if g.is_empty() {
                return bad(format!("{name} is empty"));
            }
            if g.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return bad(format!("{name} must hold positive finite values"));
            }
        }
        if self.gamma_grid.is_empty() {
            return bad("gamma_grid is empty".into());
        }
        if self.n_max == 0 {
            return bad("n_max must be positive".into());
        }
        if let Some(m) = &self.model {
            let cap = m.d2 as f64 * m.sigma / 2.0;
            if let Some(g) = self.gamma_grid.iter().find(|g| !(**g >= 0.0 && **g < cap)) {
                return bad(format!("gamma = {g} outside [0, d2 sigma / 2 = {cap})"));
            }
        }
        Ok(())
    }
}
