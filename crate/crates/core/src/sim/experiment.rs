use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inference::{are, fit, EstimateRecord, FitOptions};
use crate::models::{LinearModel, ModelKind, SeriesMatrix};
use crate::rng::derive_seed;
use crate::scoring::EstimatorKind;
use crate::sim::config::ExperimentConfig;

/// Share of failed replicates tolerated per (grid value, estimator) cell.
pub const MAX_FAILURE_RATE: f64 = 0.10;

/// One aggregated cell of an efficiency table.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub model: ModelKind,
    pub param_true: f64,
    pub estimator: EstimatorKind,
    pub mean_est: f64,
    /// Mean of the per-replicate asymptotic sds.
    pub mean_sd: f64,
    /// `(mean_sd(full) / mean_sd)^2`.
    pub are: f64,
    /// Replicates attempted.
    pub n_replicates: usize,
    pub n_boundary: usize,
    pub nu: usize,
    pub t_len: usize,
    pub seed: u64,
    /// Replicates that returned an error.
    pub n_failed: usize,
    /// Sample sd of the point estimates across replicates.
    pub est_sd: f64,
    /// Monte Carlo standard error of `mean_sd`.
    pub sd_se: f64,
    /// Delta-method Monte Carlo standard error of `are`.
    pub are_se: f64,
}

fn model_tag(kind: ModelKind) -> u64 {
    match kind {
        ModelKind::Ar1 => 1,
        ModelKind::Ma1 => 2,
    }
}

/// Seed for the data of one replicate. Keyed on the parameter value rather
/// than its grid position so a cell does not depend on the rest of the grid.
pub fn replicate_seed(master: u64, model: ModelKind, theta: f64, replicate: usize) -> u64 {
    let theta = theta + 0.0; // fold -0.0 into 0.0
    derive_seed(master, &[model_tag(model), theta.to_bits(), replicate as u64])
}

fn estimator_seed(data_seed: u64, kind: EstimatorKind) -> u64 {
    let idx = EstimatorKind::ALL.iter().position(|k| *k == kind).unwrap_or(0);
    derive_seed(data_seed, &[1 + idx as u64])
}

/// Estimators actually fitted: the requested ones plus the full-likelihood
/// baseline, in canonical order.
pub fn fitted_estimators(cfg: &ExperimentConfig) -> Vec<EstimatorKind> {
    let mut kinds = cfg.estimators.clone();
    kinds.push(EstimatorKind::FullMl);
    kinds.sort();
    kinds.dedup();
    kinds
}

fn run_replicate(
    cfg: &ExperimentConfig,
    model: &LinearModel,
    kinds: &[EstimatorKind],
    theta: f64,
    replicate: usize,
) -> Vec<Result<EstimateRecord>> {
    let seed = replicate_seed(cfg.seed, cfg.model, theta, replicate);
    let y: SeriesMatrix = match model.sample(theta, cfg.nu, cfg.t_len, seed) {
        Ok(y) => y,
        Err(e) => {
            let msg = e.to_string();
            return kinds.iter().map(|_| Err(Error::Degenerate(msg.clone()))).collect();
        }
    };
    kinds
        .iter()
        .map(|&kind| {
            let opts = FitOptions {
                mc_draws: cfg.mc_b,
                seed: estimator_seed(seed, kind),
                ..FitOptions::default()
            };
            fit(&y, kind, model, &opts)
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

struct Cell {
    estimates: Vec<f64>,
    /// Per replicate, `None` when boundary-flagged or failed.
    sds: Vec<Option<f64>>,
    n_boundary: usize,
    n_failed: usize,
    first_error: Option<String>,
}

impl Cell {
    fn collect<'a>(records: impl Iterator<Item = &'a Result<EstimateRecord>>) -> Self {
        let mut cell = Cell {
            estimates: Vec::new(),
            sds: Vec::new(),
            n_boundary: 0,
            n_failed: 0,
            first_error: None,
        };
        for r in records {
            match r {
                Ok(rec) if rec.boundary_flag => {
                    cell.n_boundary += 1;
                    cell.sds.push(None);
                }
                Ok(rec) => {
                    cell.estimates.push(rec.estimate);
                    cell.sds.push(rec.sd);
                }
                Err(e) => {
                    cell.n_failed += 1;
                    cell.first_error.get_or_insert_with(|| e.to_string());
                    cell.sds.push(None);
                }
            }
        }
        cell
    }

    fn valid_sds(&self) -> Vec<f64> {
        self.sds.iter().flatten().copied().collect()
    }
}

/// Standard error of `(mean a / mean b)^2` over replicates where both exist.
fn are_standard_error(base: &[Option<f64>], est: &[Option<f64>]) -> f64 {
    let pairs: Vec<(f64, f64)> = base
        .iter()
        .zip(est)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .collect();
    let n = pairs.len();
    if n < 2 {
        return f64::NAN;
    }
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (ma, mb) = (mean(&a), mean(&b));
    let cov = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1) as f64;
    let nf = n as f64;
    let rel_var = sample_var(&a) / (nf * ma * ma) + sample_var(&b) / (nf * mb * mb) - 2.0 * cov / (nf * ma * mb);
    2.0 * (ma / mb).powi(2) * rel_var.max(0.0).sqrt()
}

/// Run every (grid value, replicate) pair, then aggregate per estimator.
///
/// Rows come back sorted by parameter value, then estimator.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    cfg.validate()?;
    let model = LinearModel::standard(cfg.model);
    let kinds = fitted_estimators(cfg);
    let mut grid = cfg.param_grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..cfg.replicates).map(move |r| (g, r)))
        .collect();
    let work = || -> Vec<Vec<Result<EstimateRecord>>> {
        jobs.par_iter()
            .map(|&(g, r)| run_replicate(cfg, &model, &kinds, grid[g], r))
            .collect()
    };
    let results = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(work),
        None => work(),
    };

    let mut rows = Vec::new();
    for (g, &theta) in grid.iter().enumerate() {
        let block = &results[g * cfg.replicates..(g + 1) * cfg.replicates];
        let mut cells: Vec<Cell> = Vec::with_capacity(kinds.len());
        for (k, &kind) in kinds.iter().enumerate() {
            let cell = Cell::collect(block.iter().map(|rep| &rep[k]));
            let used = cell.estimates.len();
            if cell.n_failed as f64 > MAX_FAILURE_RATE * cfg.replicates as f64 || used == 0 {
                return Err(Error::ExcessiveFailures {
                    estimator: kind,
                    param: theta,
                    failed: cfg.replicates - used,
                    total: cfg.replicates,
                    first: cell
                        .first_error
                        .clone()
                        .unwrap_or_else(|| "every replicate hit the search boundary".into()),
                });
            }
            cells.push(cell);
        }
        let base = &cells[0];
        debug_assert_eq!(kinds[0], EstimatorKind::FullMl);
        let base_sd = mean(&base.valid_sds());
        for (k, &kind) in kinds.iter().enumerate() {
            if !cfg.estimators.contains(&kind) {
                continue;
            }
            let cell = &cells[k];
            let sds = cell.valid_sds();
            let mean_sd = mean(&sds);
            let (are_v, are_se) = if kind == EstimatorKind::FullMl {
                (1.0, 0.0)
            } else {
                (are(base_sd, mean_sd), are_standard_error(&base.sds, &cell.sds))
            };
            rows.push(ReportRow {
                model: cfg.model,
                param_true: theta,
                estimator: kind,
                mean_est: mean(&cell.estimates),
                mean_sd,
                are: are_v,
                n_replicates: cfg.replicates,
                n_boundary: cell.n_boundary,
                nu: cfg.nu,
                t_len: cfg.t_len,
                seed: cfg.seed,
                n_failed: cell.n_failed,
                est_sd: sample_var(&cell.estimates).sqrt(),
                sd_se: (sample_var(&sds) / sds.len() as f64).sqrt(),
                are_se,
            });
        }
    }
    Ok(rows)
}
