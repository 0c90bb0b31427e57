//! Experiment configuration: which algorithm to run, on which n grid,
//! with which dimensionless rate parameters, and where to write results.

use crate::{Error, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// The experiment families the runner knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
pub enum Experiment {
    /// Sorted uniform sensors moved to the equidistant 1D anchors.
    #[serde(rename = "anchors_1d")]
    Anchors1d,
    /// The gap-normalizing sweep with ρ = rho_n/n, s = s_n/n.
    #[serde(rename = "mv_1d")]
    Mv1d,
    /// 1D coverage & interference repair with r1 = r_2n/(2n), s = s_n/n.
    #[serde(rename = "cv1_1d")]
    Cv1_1d,
    /// 2D coverage & interference repair; rates scale with q = ⌊√n⌋.
    #[serde(rename = "cv2_2d")]
    Cv2_2d,
    /// Exact optimal matching of n = q² uniform points to the anchor grid.
    #[serde(rename = "oracle_2d")]
    Oracle2d,
    /// Deterministic moment-bound quantities (no sampling).
    #[serde(rename = "beta_lemmas")]
    BetaLemmas,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Anchors1d => "anchors_1d",
            Experiment::Mv1d => "mv_1d",
            Experiment::Cv1_1d => "cv1_1d",
            Experiment::Cv2_2d => "cv2_2d",
            Experiment::Oracle2d => "oracle_2d",
            Experiment::BetaLemmas => "beta_lemmas",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anchors_1d" => Ok(Experiment::Anchors1d),
            "mv_1d" => Ok(Experiment::Mv1d),
            "cv1_1d" => Ok(Experiment::Cv1_1d),
            "cv2_2d" => Ok(Experiment::Cv2_2d),
            "oracle_2d" => Ok(Experiment::Oracle2d),
            "beta_lemmas" => Ok(Experiment::BetaLemmas),
            other => Err(Error::Invalid(format!(
                "unknown experiment '{other}' (expected one of anchors_1d, mv_1d, \
                 cv1_1d, cv2_2d, oracle_2d, beta_lemmas)"
            ))),
        }
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full description of one experiment run. Loadable from a flat TOML file
/// with these exact keys; rate parameters are dimensionless multiples
/// (rho_n = ρ·n, s_n = s·n, r_2n = r·2n on the line or r·2⌊√n⌋ on the
/// square) so a single config spans the whole n grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Explicit n grid; when absent a per-experiment default is used
    /// (multiples of `stride` up to 5000 for the 1D/2D samplers).
    #[serde(default)]
    pub n_grid: Option<Vec<u64>>,
    /// Cost exponent a > 0.
    pub a: f64,
    #[serde(default)]
    pub rho_n: Option<f64>,
    #[serde(default)]
    pub s_n: Option<f64>,
    #[serde(default)]
    pub r_2n: Option<f64>,
    pub reps: u64,
    pub master_seed: u64,
    pub output: PathBuf,
    /// Grid stride when n_grid is not given (default 50).
    #[serde(default)]
    pub stride: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| Error::Invalid(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || self.a <= 0.0 {
            return Err(Error::Invalid(format!(
                "exponent a must be finite and > 0, got {}",
                self.a
            )));
        }
        if self.reps == 0 {
            return Err(Error::Invalid("reps must be >= 1".into()));
        }
        if self.reps > u32::MAX as u64 {
            return Err(Error::Invalid(format!(
                "reps = {} exceeds the 2^32 - 1 stream limit",
                self.reps
            )));
        }
        if let Some(grid) = &self.n_grid {
            if grid.is_empty() {
                return Err(Error::Invalid("n_grid must be non-empty".into()));
            }
            for (i, &n) in grid.iter().enumerate() {
                if n == 0 {
                    return Err(Error::Invalid("n_grid entries must be >= 1".into()));
                }
                if n > u32::MAX as u64 {
                    return Err(Error::Invalid(format!(
                        "n = {n} exceeds the 2^32 - 1 stream limit"
                    )));
                }
                if i > 0 && n <= grid[i - 1] {
                    return Err(Error::Invalid(
                        "n_grid must be strictly ascending".into(),
                    ));
                }
            }
        }
        if self.stride == Some(0) {
            return Err(Error::Invalid("stride must be >= 1".into()));
        }
        for (name, v) in [("rho_n", self.rho_n), ("s_n", self.s_n), ("r_2n", self.r_2n)] {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Invalid(format!(
                        "{name} must be finite and >= 0, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The n values to run: the explicit grid when given, otherwise a
    /// per-experiment default.
    pub fn effective_n_grid(&self) -> Vec<u64> {
        if let Some(grid) = &self.n_grid {
            return grid.clone();
        }
        match self.experiment {
            // small perfect squares; the exact solver is cubic
            Experiment::Oracle2d => vec![16, 64, 144, 256, 400],
            // each value costs O(n) quadratures
            Experiment::BetaLemmas => vec![100, 1000, 10_000],
            _ => {
                let stride = self.stride.unwrap_or(50);
                (1..)
                    .map(|k| k * stride)
                    .take_while(|&n| n <= 5000)
                    .collect()
            }
        }
    }

    /// ρ for the sweep at this n (default ρ·n = 1.8, the slack regime).
    pub fn rho_at(&self, n: u64) -> f64 {
        self.rho_n.unwrap_or(1.8) / n as f64
    }

    /// s at this n for 1D experiments (default s·n = 0.5).
    pub fn s_at(&self, n: u64) -> f64 {
        self.s_n.unwrap_or(0.5) / n as f64
    }

    /// r1 at this n (default r·2n = 1.2).
    pub fn r1_at(&self, n: u64) -> f64 {
        self.r_2n.unwrap_or(1.2) / (2.0 * n as f64)
    }

    /// Upper-moment rate for the bound quantities (default ρ·n = 1.5,
    /// i.e. slack 0.5 above critical).
    pub fn bound_rate_upper(&self, n: u64) -> f64 {
        self.rho_n.unwrap_or(1.5) / n as f64
    }
}
