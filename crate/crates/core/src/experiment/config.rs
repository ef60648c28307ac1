use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{validate_ranks, GeneratorKind};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::multiindex::Shape;

pub const DEFAULT_MAX_RESAMPLE: usize = 25;
pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Preset problem sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    /// 20×20×20×20
    Desk,
    /// 100×100×100×100
    Paper,
}

impl Scale {
    pub fn mode_size(self) -> usize {
        match self {
            Scale::Desk => 20,
            Scale::Paper => 100,
        }
    }
}

fn default_rank_tol() -> f64 {
    DEFAULT_RANK_TOL
}

fn default_max_resample() -> usize {
    DEFAULT_MAX_RESAMPLE
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

/// Experiment configuration, read from JSON. Unknown fields are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub shape: Vec<usize>,
    pub ranks: Vec<usize>,
    pub generators: Vec<GeneratorKind>,
    pub trials: usize,
    /// `|I_1|..|I_{d-1}|`; `None` means `4 r_i` capped by the pool.
    #[serde(rename = "sample_sizes_I", default)]
    pub sample_sizes_i: Option<Vec<usize>>,
    /// `|J_1|..|J_{d-1}|`; `None` means `4 r_i` capped by `Π_{j>i} n_j`.
    #[serde(rename = "sample_sizes_J", default)]
    pub sample_sizes_j: Option<Vec<usize>>,
    pub master_seed: u64,
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    #[serde(default = "default_max_resample")]
    pub max_resample: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_true")]
    pub emit_svg: bool,
}

impl ExperimentConfig {
    /// Four modes of equal size, ranks (2, 3, 2), 20 trials, all generators.
    pub fn preset(scale: Scale) -> Self {
        let n = scale.mode_size();
        ExperimentConfig {
            d: 4,
            shape: vec![n; 4],
            ranks: vec![2, 3, 2],
            generators: GeneratorKind::ALL.to_vec(),
            trials: DEFAULT_TRIALS,
            sample_sizes_i: None,
            sample_sizes_j: None,
            master_seed: DEFAULT_SEED,
            rank_tol: DEFAULT_RANK_TOL,
            max_resample: DEFAULT_MAX_RESAMPLE,
            output_dir: default_output_dir(),
            emit_svg: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn shape(&self) -> Result<Shape> {
        Shape::new(self.shape.clone()).map_err(|e| Error::Config(e.to_string()))
    }

    /// Replace the shape by the preset's, keeping everything else.
    pub fn with_scale(mut self, scale: Scale) -> Self {
        self.shape = vec![scale.mode_size(); self.d];
        self
    }

    /// Every `|I_i|` and `|J_i|` set to its pool size, so α = β = 1.
    pub fn full_sampling(mut self) -> Self {
        let d = self.shape.len();
        self.sample_sizes_i = Some((1..d).map(|i| self.shape[..i].iter().product()).collect());
        self.sample_sizes_j = Some((1..d).map(|i| self.shape[i..].iter().product()).collect());
        self
    }

    /// Resolved `|I_i|`.
    pub fn row_sample_sizes(&self) -> Vec<usize> {
        self.sample_sizes_i.clone().unwrap_or_else(|| {
            let mut prev = 1usize;
            self.ranks
                .iter()
                .enumerate()
                .map(|(k, &r)| {
                    let m = (4 * r).min(prev * self.shape[k]);
                    prev = m;
                    m
                })
                .collect()
        })
    }

    /// Resolved `|J_i|`.
    pub fn col_sample_sizes(&self) -> Vec<usize> {
        self.sample_sizes_j.clone().unwrap_or_else(|| {
            self.ranks
                .iter()
                .enumerate()
                .map(|(k, &r)| (4 * r).min(self.shape[k + 1..].iter().product()))
                .collect()
        })
    }

    pub fn validate(&self) -> Result<()> {
        let shape = self.shape()?;
        if self.d != shape.order() {
            return Err(Error::Config(format!(
                "d = {} but shape has {} modes",
                self.d,
                shape.order()
            )));
        }
        validate_ranks(&shape, &self.ranks)?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.generators.is_empty() {
            return Err(Error::Config("at least one generator is required".into()));
        }
        let unique: BTreeSet<_> = self.generators.iter().collect();
        if unique.len() != self.generators.len() {
            return Err(Error::Config("generators must not repeat".into()));
        }
        if !(self.rank_tol > 0.0 && self.rank_tol < 1.0) {
            return Err(Error::Config(format!(
                "rank_tol must lie in (0, 1), got {}",
                self.rank_tol
            )));
        }
        let rows = self.row_sample_sizes();
        let cols = self.col_sample_sizes();
        let d = self.d;
        if rows.len() != d - 1 || cols.len() != d - 1 {
            return Err(Error::Config(format!("need {} sample sizes per family", d - 1)));
        }
        let mut prev = 1usize;
        for k in 0..d - 1 {
            let r = self.ranks[k];
            let pool = prev * self.shape[k];
            if rows[k] < r || rows[k] > pool {
                return Err(Error::Config(format!(
                    "|I_{}| = {} must lie in [r_{} = {r}, |I_{}|·n_{} = {pool}]",
                    k + 1,
                    rows[k],
                    k + 1,
                    k,
                    k + 1
                )));
            }
            prev = rows[k];
            let col_pool: usize = self.shape[k + 1..].iter().product();
            if cols[k] < r || cols[k] > col_pool {
                return Err(Error::Config(format!(
                    "|J_{}| = {} must lie in [r_{} = {r}, {col_pool}]",
                    k + 1,
                    cols[k],
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for s in [Scale::Desk, Scale::Paper] {
            let c = ExperimentConfig::preset(s);
            c.validate().unwrap();
            assert_eq!(c.row_sample_sizes(), vec![8, 12, 8]);
            assert_eq!(c.col_sample_sizes(), vec![8, 12, 8]);
            c.clone().full_sampling().validate().unwrap();
        }
        let full = ExperimentConfig::preset(Scale::Paper).full_sampling();
        assert_eq!(full.row_sample_sizes(), vec![100, 10_000, 1_000_000]);
        assert_eq!(full.col_sample_sizes(), vec![1_000_000, 10_000, 100]);
    }

    #[test]
    fn default_sizes_are_capped_by_pools() {
        let mut c = ExperimentConfig::preset(Scale::Desk);
        c.shape = vec![3, 2, 5, 3];
        assert_eq!(c.row_sample_sizes(), vec![3, 6, 8]);
        assert_eq!(c.col_sample_sizes(), vec![8, 12, 3]);
        c.validate().unwrap();
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let c = ExperimentConfig::preset(Scale::Desk);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["colour"] = serde_json::json!("blue");
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn minimal_json_uses_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"d":3,"shape":[5,5,5],"ranks":[2,2],"generators":["uniform"],"trials":2,"master_seed":1}"#,
        )
        .unwrap();
        assert_eq!(c.rank_tol, DEFAULT_RANK_TOL);
        assert_eq!(c.max_resample, DEFAULT_MAX_RESAMPLE);
        assert!(c.emit_svg);
    }

    #[test]
    fn invalid_configs() {
        let base = ExperimentConfig::preset(Scale::Desk);
        let mut c = base.clone();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.d = 3;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.sample_sizes_i = Some(vec![1, 12, 8]);
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.sample_sizes_i = Some(vec![8, 200, 8]);
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.sample_sizes_j = Some(vec![8, 12, 21]);
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.generators = vec![GeneratorKind::Uniform, GeneratorKind::Uniform];
        assert!(c.validate().is_err());
        let mut c = base;
        c.rank_tol = 0.0;
        assert!(c.validate().is_err());
    }
}
