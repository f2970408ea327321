use crate::error::{Error, Result};
use crate::inference::godambe::{
    are, default_method, default_sensitivity, godambe_empirical, godambe_montecarlo, GodambeComponents,
    InformationMethod, McDesign, SensitivitySource,
};
use crate::inference::optimize::{at_search_edge, minimize_scalar, SEARCH_BOUND, SEARCH_TOL};
use crate::models::{LinearModel, SeriesMatrix};
use crate::scoring::{total_score, EstimatorKind};
use crate::wishart::{hw_estimate_ctx, WishartContext};

pub const DEFAULT_MC_DRAWS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// `None` picks the per-estimator default: empirical for per-series
    /// scores, Monte Carlo for the Wishart score.
    pub information: Option<InformationMethod>,
    /// `None` picks analytic curvature for AR(1), simulated for MA(1).
    pub wishart_sensitivity: Option<SensitivitySource>,
    pub mc_draws: usize,
    pub seed: u64,
    /// Baseline sd used to fill [`EstimateRecord::are`].
    pub sd_mle: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            information: None,
            wishart_sensitivity: None,
            mc_draws: DEFAULT_MC_DRAWS,
            seed: 0,
            sd_mle: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateRecord {
    pub kind: EstimatorKind,
    pub estimate: f64,
    /// `None` when the estimate is boundary-flagged.
    pub sd: Option<f64>,
    pub are: Option<f64>,
    pub boundary_flag: bool,
    pub information: Option<GodambeComponents>,
}

fn point_estimate(y: &SeriesMatrix, kind: EstimatorKind, model: &LinearModel) -> Result<(f64, Option<WishartContext>)> {
    if kind == EstimatorKind::HyvarinenWishart {
        let ctx = WishartContext::from_series(y, *model)?;
        let est = hw_estimate_ctx(&ctx)?;
        return Ok((est, Some(ctx)));
    }
    // Surface validation errors (length, kind) before the search swallows them.
    total_score(y, kind, model, 0.0)?;
    let est = minimize_scalar(
        |th| total_score(y, kind, model, th).unwrap_or(f64::NAN),
        -SEARCH_BOUND,
        SEARCH_BOUND,
        SEARCH_TOL,
    )?;
    Ok((est, None))
}

/// Minimum-score estimate of the free parameter with its sandwich sd.
pub fn fit(y: &SeriesMatrix, kind: EstimatorKind, model: &LinearModel, opts: &FitOptions) -> Result<EstimateRecord> {
    let (estimate, _ctx) = point_estimate(y, kind, model)?;
    let boundary_flag = at_search_edge(estimate);
    if boundary_flag {
        return Ok(EstimateRecord {
            kind,
            estimate,
            sd: None,
            are: None,
            boundary_flag,
            information: None,
        });
    }

    let method = opts.information.unwrap_or_else(|| default_method(kind));
    let (info, units) = match (kind, method) {
        (EstimatorKind::HyvarinenWishart, InformationMethod::MonteCarlo) => {
            let design = McDesign {
                t_len: y.t_len(),
                nu: y.nu(),
                draws: opts.mc_draws,
            };
            let k_source = opts.wishart_sensitivity.unwrap_or_else(|| default_sensitivity(model));
            (godambe_montecarlo(model, estimate, kind, design, k_source, opts.seed)?, 1.0)
        }
        (EstimatorKind::HyvarinenWishart, m) => {
            return Err(Error::Config(format!("the Wishart score supports Monte Carlo information only, not {m:?}")))
        }
        (_, InformationMethod::Empirical) => (godambe_empirical(y, kind, model, estimate)?, y.nu() as f64),
        (_, InformationMethod::MonteCarlo) => {
            let design = McDesign {
                t_len: y.t_len(),
                nu: 1,
                draws: opts.mc_draws,
            };
            let info = godambe_montecarlo(model, estimate, kind, design, SensitivitySource::Analytic, opts.seed)?;
            (info, y.nu() as f64)
        }
        (_, InformationMethod::Analytic) => {
            return Err(Error::Config("analytic information is not available for per-series scores".into()))
        }
    };
    let sd = info.sd(units);
    Ok(EstimateRecord {
        kind,
        estimate,
        sd: Some(sd),
        are: opts.sd_mle.map(|m| are(m, sd)),
        boundary_flag,
        information: Some(info),
    })
}
