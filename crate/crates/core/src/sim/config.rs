//! Experiment configuration: validation plus the flat `key=value` file format.
//!
//! ```text
//! # AR(1) spot rows at full size
//! model = ar1
//! grid = -0.5, 0, 0.5
//! nu = 200
//! t = 50
//! replicates = 200
//! mc-b = 500
//! seed = 42
//! estimators = full,pairwise,hyv,hyv-wishart
//! out = ar1.csv
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::inference::fit::DEFAULT_MC_DRAWS;
use crate::inference::godambe::MIN_MC_DRAWS;
use crate::models::ModelKind;
use crate::scoring::EstimatorKind;

pub const DEFAULT_NU: usize = 200;
pub const DEFAULT_T: usize = 50;
pub const DEFAULT_REPLICATES: usize = 200;
pub const DEFAULT_SEED: u64 = 1;

/// `-0.9, -0.8, ..., 0.9`.
pub fn default_grid() -> Vec<f64> {
    (-9..=9).map(|k| k as f64 / 10.0).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub param_grid: Vec<f64>,
    pub nu: usize,
    pub t_len: usize,
    pub replicates: usize,
    pub mc_b: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorKind>,
    pub out_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    pub sd_svg_path: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(model: ModelKind) -> Self {
        Self {
            model,
            param_grid: default_grid(),
            nu: DEFAULT_NU,
            t_len: DEFAULT_T,
            replicates: DEFAULT_REPLICATES,
            mc_b: DEFAULT_MC_DRAWS,
            seed: DEFAULT_SEED,
            estimators: EstimatorKind::ALL.to_vec(),
            out_path: None,
            svg_path: None,
            sd_svg_path: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.replicates == 0 {
            return bad("replicates must be >= 1".into());
        }
        if self.nu < 2 {
            return bad(format!("nu must be >= 2, got {}", self.nu));
        }
        if self.param_grid.is_empty() {
            return bad("parameter grid is empty".into());
        }
        if let Some(v) = self.param_grid.iter().find(|v| !(v.abs() < 1.0)) {
            return bad(format!("grid value {v} is outside the open interval (-1, 1)"));
        }
        if self.estimators.is_empty() {
            return bad("no estimators selected".into());
        }
        let min_t = match self.model {
            ModelKind::Ar1 if self.estimators.contains(&EstimatorKind::HyvarinenUnivariate) => 3,
            _ => 2,
        };
        if self.t_len < min_t {
            return bad(format!("series length t must be >= {min_t}, got {}", self.t_len));
        }
        if self.estimators.contains(&EstimatorKind::HyvarinenWishart) {
            if self.nu < self.t_len + 2 {
                return bad(format!(
                    "hyv-wishart needs nu >= t + 2 (nu = {}, t = {})",
                    self.nu, self.t_len
                ));
            }
            if self.mc_b < MIN_MC_DRAWS {
                return bad(format!("mc-b must be >= {MIN_MC_DRAWS}, got {}", self.mc_b));
            }
        }
        if self.threads == Some(0) {
            return bad("threads must be >= 1".into());
        }
        Ok(())
    }
}

/// Optional settings gathered from a config file or command-line flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub model: Option<ModelKind>,
    pub grid: Option<Vec<f64>>,
    pub nu: Option<usize>,
    pub t_len: Option<usize>,
    pub replicates: Option<usize>,
    pub mc_b: Option<usize>,
    pub seed: Option<u64>,
    pub estimators: Option<Vec<EstimatorKind>>,
    pub out_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    pub sd_svg_path: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl ConfigOverrides {
    /// Values set in `self` win over `base`.
    pub fn over(self, base: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            model: self.model.or(base.model),
            grid: self.grid.or(base.grid),
            nu: self.nu.or(base.nu),
            t_len: self.t_len.or(base.t_len),
            replicates: self.replicates.or(base.replicates),
            mc_b: self.mc_b.or(base.mc_b),
            seed: self.seed.or(base.seed),
            estimators: self.estimators.or(base.estimators),
            out_path: self.out_path.or(base.out_path),
            svg_path: self.svg_path.or(base.svg_path),
            sd_svg_path: self.sd_svg_path.or(base.sd_svg_path),
            threads: self.threads.or(base.threads),
        }
    }

    pub fn into_config(self) -> Result<ExperimentConfig> {
        let model = self
            .model
            .ok_or_else(|| Error::Config("model is required (ar1 or ma1)".into()))?;
        let mut cfg = ExperimentConfig::new(model);
        if let Some(g) = self.grid {
            cfg.param_grid = g;
        }
        cfg.nu = self.nu.unwrap_or(cfg.nu);
        cfg.t_len = self.t_len.unwrap_or(cfg.t_len);
        cfg.replicates = self.replicates.unwrap_or(cfg.replicates);
        cfg.mc_b = self.mc_b.unwrap_or(cfg.mc_b);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        if let Some(e) = self.estimators {
            cfg.estimators = e;
        }
        cfg.out_path = self.out_path;
        cfg.svg_path = self.svg_path;
        cfg.sd_svg_path = self.sd_svg_path;
        cfg.threads = self.threads;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Config(format!("grid value `{t}` is not a number")))
        })
        .collect()
}

/// Comma list of estimator names, deduplicated, in canonical order.
pub fn parse_estimators(s: &str) -> Result<Vec<EstimatorKind>> {
    let mut kinds = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse::<EstimatorKind>)
        .collect::<Result<Vec<_>>>()?;
    kinds.sort();
    kinds.dedup();
    Ok(kinds)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}` expects a non-negative integer, got `{v}`")))
}

/// Parse `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<ConfigOverrides> {
    let mut seen = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1)))?;
        let key = k.trim().to_ascii_lowercase().replace('_', "-");
        seen.insert(key, v.trim().to_string());
    }
    let mut o = ConfigOverrides::default();
    for (key, v) in seen {
        match key.as_str() {
            "model" => o.model = Some(v.parse()?),
            "grid" => o.grid = Some(parse_grid(&v)?),
            "nu" => o.nu = Some(parse_num(&key, &v)?),
            "t" => o.t_len = Some(parse_num(&key, &v)?),
            "replicates" => o.replicates = Some(parse_num(&key, &v)?),
            "mc-b" => o.mc_b = Some(parse_num(&key, &v)?),
            "seed" => o.seed = Some(parse_num(&key, &v)?),
            "estimators" => o.estimators = Some(parse_estimators(&v)?),
            "out" => o.out_path = Some(v.into()),
            "svg" => o.svg_path = Some(v.into()),
            "sd-svg" => o.sd_svg_path = Some(v.into()),
            "threads" => o.threads = Some(parse_num(&key, &v)?),
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
    }
    Ok(o)
}

pub fn load_config_file(path: &Path) -> Result<ConfigOverrides> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text)
}
