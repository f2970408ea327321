//! Variability `J`, sensitivity `K` and Godambe information `G = K^2 / J`
//! for a scalar parameter.
//!
//! Per-series estimators treat one series as the observation unit, so the
//! asymptotic sd with `nu` series is `1 / sqrt(nu G)`. The Wishart score is a
//! single function of `S`; its components describe that one observation and
//! the sd is `1 / sqrt(G)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inference::numdiff::{grad_step, hess_step, vector_derivatives};
use crate::models::{LinearModel, ModelKind, SeriesMatrix};
use crate::rng::derive_seed;
use crate::scoring::{per_series_objectives, EstimatorKind};
use crate::wishart::{hw_grad_with_precision, sensitivity_from_derivative, WishartContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InformationMethod {
    Empirical,
    MonteCarlo,
    Analytic,
}

/// Where the Wishart-score sensitivity comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SensitivitySource {
    /// `1/4 sum (dl^{ij}/dl)^2` evaluated at the parameter.
    Analytic,
    /// Mean numerical second derivative over the simulated draws.
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GodambeComponents {
    pub j_hat: f64,
    pub k_hat: f64,
    pub g_hat: f64,
    pub method: InformationMethod,
    /// Monte Carlo standard error of `sqrt(J) / K`, when it can be estimated.
    pub sd_unit_se: Option<f64>,
}

impl GodambeComponents {
    fn new(j_hat: f64, k_hat: f64, method: InformationMethod) -> Result<Self> {
        if !(j_hat > 0.0) || !j_hat.is_finite() || !k_hat.is_finite() {
            return Err(Error::Degenerate(format!("variability J = {j_hat:e}, sensitivity K = {k_hat:e}")));
        }
        Ok(Self {
            j_hat,
            k_hat,
            g_hat: k_hat * k_hat / j_hat,
            method,
            sd_unit_se: None,
        })
    }

    /// Asymptotic sd of the estimator from `units` independent observations.
    pub fn sd(&self, units: f64) -> f64 {
        1.0 / (units * self.g_hat).sqrt()
    }
}

/// Draw sizes for Monte Carlo information estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McDesign {
    pub t_len: usize,
    /// Series per Wishart draw; ignored for per-series estimators.
    pub nu: usize,
    pub draws: usize,
}

pub const MIN_MC_DRAWS: usize = 50;

/// Delta-method standard error of `sqrt(mean g^2) / mean h` from paired
/// per-unit gradients `g` and curvatures `h`.
fn unit_sd_standard_error(grad: &[f64], curv: &[f64]) -> Option<f64> {
    let n = grad.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let sq: Vec<f64> = grad.iter().map(|g| g * g).collect();
    let mj = sq.iter().sum::<f64>() / nf;
    let mk = curv.iter().sum::<f64>() / nf;
    let (mut vj, mut vk, mut cjk) = (0.0, 0.0, 0.0);
    for (a, b) in sq.iter().zip(curv) {
        vj += (a - mj).powi(2);
        vk += (b - mk).powi(2);
        cjk += (a - mj) * (b - mk);
    }
    let denom = nf * (nf - 1.0);
    let (vj, vk, cjk) = (vj / denom, vk / denom, cjk / denom);
    // d = sqrt(J)/K: dd/dJ = 1/(2 sqrt(J) K), dd/dK = -sqrt(J)/K^2
    let sj = mj.sqrt();
    let (a, b) = (1.0 / (2.0 * sj * mk), -sj / (mk * mk));
    let var = a * a * vj + b * b * vk + 2.0 * a * b * cjk;
    (var >= 0.0).then(|| var.sqrt())
}

fn from_unit_derivatives(grad: &[f64], curv: &[f64], method: InformationMethod) -> Result<GodambeComponents> {
    let n = grad.len() as f64;
    if grad.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::Degenerate("per-unit score gradients have no spread".into()));
    }
    let j_hat = grad.iter().map(|g| g * g).sum::<f64>() / n;
    let k_hat = curv.iter().sum::<f64>() / n;
    let mut out = GodambeComponents::new(j_hat, k_hat, method)?;
    out.sd_unit_se = unit_sd_standard_error(grad, curv);
    Ok(out)
}

/// `J = mean s(y_i, theta)^2`, `K = mean ds(y_i, theta)/dtheta` over the rows of `y`.
pub fn godambe_empirical(
    y: &SeriesMatrix,
    kind: EstimatorKind,
    model: &LinearModel,
    theta_hat: f64,
) -> Result<GodambeComponents> {
    if !kind.is_per_series() {
        return Err(Error::UnsupportedKind(kind));
    }
    if y.nu() < 2 {
        return Err(Error::domain("empirical information needs at least two series"));
    }
    let (grad, curv) = vector_derivatives(|th| per_series_objectives(y, kind, model, th), theta_hat)?;
    from_unit_derivatives(&grad, &curv, InformationMethod::Empirical)
}

/// Same expectations as [`godambe_empirical`], over `draws` fresh
/// realizations simulated at `theta`.
///
/// For the Wishart score each draw is `S` from `design.nu` series, the
/// gradient is the analytic score derivative and `K` comes from `k_source`.
pub fn godambe_montecarlo(
    model: &LinearModel,
    theta: f64,
    kind: EstimatorKind,
    design: McDesign,
    k_source: SensitivitySource,
    seed: u64,
) -> Result<GodambeComponents> {
    if design.draws < MIN_MC_DRAWS {
        return Err(Error::Config(format!(
            "Monte Carlo information needs at least {MIN_MC_DRAWS} draws, got {}",
            design.draws
        )));
    }
    if kind.is_per_series() {
        let y = model.sample(theta, design.draws, design.t_len, seed)?;
        let (grad, curv) = vector_derivatives(|th| per_series_objectives(&y, kind, model, th), theta)?;
        return from_unit_derivatives(&grad, &curv, InformationMethod::MonteCarlo);
    }
    wishart_montecarlo(model, theta, design, k_source, seed)
}

fn wishart_montecarlo(
    model: &LinearModel,
    theta: f64,
    design: McDesign,
    k_source: SensitivitySource,
    seed: u64,
) -> Result<GodambeComponents> {
    let t = design.t_len;
    let prec = model.precision(theta, t)?;
    let dprec = model.precision_derivative(theta, t)?;
    let h = hess_step(theta).max(grad_step(theta));
    let shifted = |th: f64| -> Result<_> { Ok((model.precision(th, t)?, model.precision_derivative(th, t)?)) };
    let (prec_p, dprec_p) = shifted(theta + h)?;
    let (prec_m, dprec_m) = shifted(theta - h)?;

    let per_draw: Vec<(f64, f64)> = (0..design.draws)
        .into_par_iter()
        .map(|b| {
            let y = model.sample(theta, design.nu, t, derive_seed(seed, &[b as u64]))?;
            let ctx = WishartContext::from_series(&y, *model)?;
            let g = hw_grad_with_precision(&ctx, &prec, &dprec)?;
            let gp = hw_grad_with_precision(&ctx, &prec_p, &dprec_p)?;
            let gm = hw_grad_with_precision(&ctx, &prec_m, &dprec_m)?;
            Ok((g, (gp - gm) / (2.0 * h)))
        })
        .collect::<Result<_>>()?;
    let grad: Vec<f64> = per_draw.iter().map(|p| p.0).collect();
    let mut curv: Vec<f64> = per_draw.iter().map(|p| p.1).collect();
    if k_source == SensitivitySource::Analytic {
        let k = sensitivity_from_derivative(&dprec);
        curv.iter_mut().for_each(|c| *c = k);
    }
    from_unit_derivatives(&grad, &curv, InformationMethod::MonteCarlo)
}

/// Per-series Fisher information for the free parameter.
///
/// `Empirical`: mean observed curvature of the negative log-likelihood over
/// `design.draws` series simulated at `theta0`; `MonteCarlo`: variance of the
/// likelihood score over the same number of simulated series.
pub fn fisher_information(
    model: &LinearModel,
    theta0: f64,
    method: InformationMethod,
    design: McDesign,
    seed: u64,
) -> Result<f64> {
    let y = model.sample(theta0, design.draws, design.t_len, seed)?;
    let (grad, curv) =
        vector_derivatives(|th| per_series_objectives(&y, EstimatorKind::FullMl, model, th), theta0)?;
    let n = grad.len() as f64;
    match method {
        InformationMethod::Empirical => Ok(curv.iter().sum::<f64>() / n),
        InformationMethod::MonteCarlo => Ok(grad.iter().map(|g| g * g).sum::<f64>() / n),
        InformationMethod::Analytic => Err(Error::Config(
            "Fisher information is available by the empirical or Monte Carlo method only".into(),
        )),
    }
}

/// Asymptotic relative efficiency `(sd_mle / sd_est)^2`.
pub fn are(sd_mle: f64, sd_est: f64) -> f64 {
    debug_assert!(sd_mle > 0.0 && sd_est > 0.0);
    (sd_mle / sd_est).powi(2)
}

/// Which information method each estimator uses by default.
pub fn default_method(kind: EstimatorKind) -> InformationMethod {
    match kind {
        EstimatorKind::HyvarinenWishart => InformationMethod::MonteCarlo,
        _ => InformationMethod::Empirical,
    }
}

/// Analytic curvature for AR(1) (closed form available), simulated for MA(1).
pub fn default_sensitivity(model: &LinearModel) -> SensitivitySource {
    match model.kind {
        ModelKind::Ar1 => SensitivitySource::Analytic,
        ModelKind::Ma1 => SensitivitySource::MonteCarlo,
    }
}
