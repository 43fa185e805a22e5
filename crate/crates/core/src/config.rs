//! Model configuration: a flat TOML document with sections for the metric,
//! the extrinsic-data fields, an optional perturbation and solver settings.
//! Unknown keys are rejected.

use crate::error::{usage, Result};
use crate::fields::TrigPoly;
use crate::initial_data::{InitialData, Perturbation, ProductData};
use crate::profile::MetricProfile;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub metric: MetricSection,
    #[serde(default)]
    pub extrinsic: Option<ExtrinsicSection>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSection>,
    #[serde(default)]
    pub solver: Option<SolverSection>,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    /// "round", "round_r", "poly" or "table".
    pub preset: String,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub coeffs: Option<Vec<f64>>,
    /// Two-column (theta, rho) text file for the "table" preset.
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrinsicSection {
    /// alpha(t) = sum_k alpha[k] t^k.
    #[serde(default)]
    pub alpha: Vec<f64>,
    /// beta(theta) = (sum_k beta_sin[k-1] sin^k u) * (sum_j beta_cos[j] cos^j u).
    #[serde(default)]
    pub beta_sin: Vec<f64>,
    #[serde(default)]
    pub beta_cos: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSection {
    pub amp: f64,
    #[serde(default = "default_t_freq")]
    pub t_freq: f64,
    #[serde(default = "default_theta_mode")]
    pub theta_mode: usize,
}

fn default_t_freq() -> f64 {
    1.0
}

fn default_theta_mode() -> usize {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub m_max: Option<usize>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub newton_tol: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub quad_n: Option<usize>,
}

pub const N_MIN: usize = 8;
pub const N_MAX: usize = 4096;

pub fn check_resolution(n: usize) -> Result<usize> {
    if !(N_MIN..=N_MAX).contains(&n) {
        return Err(usage(format!("resolution n = {n} outside {N_MIN}..={N_MAX}")));
    }
    Ok(n)
}

impl ModelConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| usage(format!("config error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(|p| p.to_path_buf());
        Ok(cfg)
    }

    pub fn build_profile(&self) -> Result<MetricProfile> {
        let m = &self.metric;
        match m.preset.as_str() {
            "table" => {
                let rel = m
                    .path
                    .as_ref()
                    .ok_or_else(|| usage("metric preset 'table' needs path"))?;
                let mut p = PathBuf::from(rel);
                if p.is_relative() {
                    if let Some(base) = &self.base_dir {
                        p = base.join(p);
                    }
                }
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| usage(format!("cannot read profile table {}: {e}", p.display())))?;
                let profile = MetricProfile::from_table_str(&text)?;
                profile.validate(crate::profile::DEFAULT_POLE_TOL)?;
                Ok(profile)
            }
            other => MetricProfile::from_preset(other, m.r, m.coeffs.as_deref()),
        }
    }

    pub fn build_product(&self) -> Result<ProductData> {
        let metric = self.build_profile()?;
        let (alpha, beta) = match &self.extrinsic {
            None => (Vec::new(), TrigPoly::zero()),
            Some(e) => {
                let mut sin = vec![0.0];
                sin.extend_from_slice(&e.beta_sin);
                let beta = if e.beta_sin.iter().all(|&c| c == 0.0) {
                    TrigPoly::zero()
                } else {
                    TrigPoly::new(sin, e.beta_cos.clone())
                };
                (e.alpha.clone(), beta)
            }
        };
        ProductData::new(metric, alpha, beta)
    }

    pub fn build_initial_data(&self) -> Result<InitialData> {
        let product = self.build_product()?;
        Ok(match &self.perturbation {
            None => InitialData::Product(product),
            Some(p) => InitialData::Conformal {
                product,
                psi: Perturbation { amp: p.amp, t_freq: p.t_freq, theta_mode: p.theta_mode },
            },
        })
    }

    pub fn n(&self, default: usize) -> Result<usize> {
        check_resolution(self.solver.as_ref().and_then(|s| s.n).unwrap_or(default))
    }

    pub fn m_max(&self, default: usize) -> usize {
        self.solver.as_ref().and_then(|s| s.m_max).unwrap_or(default)
    }

    pub fn c(&self, default: f64) -> f64 {
        self.solver.as_ref().and_then(|s| s.c).unwrap_or(default)
    }

    pub fn newton_tol(&self) -> f64 {
        self.solver.as_ref().and_then(|s| s.newton_tol).unwrap_or(1e-10)
    }

    pub fn max_iters(&self) -> usize {
        self.solver.as_ref().and_then(|s| s.max_iters).unwrap_or(25)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
[metric]
preset = "round"

[extrinsic]
beta_sin = [0.0, 0.8]

[solver]
n = 128
c = 1.0
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = ModelConfig::from_toml_str(GOOD).unwrap();
        let d = cfg.build_product().unwrap();
        assert!((d.beta_at(std::f64::consts::FRAC_PI_2) - 0.8).abs() < 1e-15);
        assert_eq!(cfg.n(256).unwrap(), 128);
        assert_eq!(cfg.m_max(8), 8);
        let id = cfg.build_initial_data().unwrap();
        assert!(id.is_product());
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = GOOD.replace("beta_sin", "beta_sine");
        let err = ModelConfig::from_toml_str(&bad).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let bad2 = format!("{GOOD}\n[typo_section]\nx = 1\n");
        assert!(ModelConfig::from_toml_str(&bad2).is_err());
    }

    #[test]
    fn resolution_bounds_are_enforced() {
        assert!(check_resolution(7).is_err());
        assert!(check_resolution(8).is_ok());
        assert!(check_resolution(4096).is_ok());
        assert!(check_resolution(5000).is_err());
    }

    #[test]
    fn perturbation_section_builds_conformal_data() {
        let text = format!("{GOOD}\n[perturbation]\namp = 0.05\n");
        let cfg = ModelConfig::from_toml_str(&text).unwrap();
        let id = cfg.build_initial_data().unwrap();
        assert!(!id.is_product());
    }
}
