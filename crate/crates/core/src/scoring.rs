//! Per-series objectives: full and consecutive-pairwise log-likelihoods and
//! the univariate Hyvärinen score, for AR(1) and MA(1).
//!
//! Log-likelihood values follow the usual displays with additive constants
//! dropped, so values are only comparable within one estimator. The
//! estimation layer always minimizes; [`SeriesScorer`] negates the
//! log-likelihoods.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::models::{ma1_covariance, ma1_precision, Ar1Params, LinearModel, Ma1Params, ModelKind, SeriesMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EstimatorKind {
    FullMl,
    PairwiseMl,
    HyvarinenUnivariate,
    HyvarinenWishart,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::FullMl,
        EstimatorKind::PairwiseMl,
        EstimatorKind::HyvarinenUnivariate,
        EstimatorKind::HyvarinenWishart,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::FullMl => "full",
            EstimatorKind::PairwiseMl => "pairwise",
            EstimatorKind::HyvarinenUnivariate => "hyv",
            EstimatorKind::HyvarinenWishart => "hyv-wishart",
        }
    }

    /// True for the estimators whose objective is a sum over series.
    pub fn is_per_series(self) -> bool {
        self != EstimatorKind::HyvarinenWishart
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" | "mle" => Ok(EstimatorKind::FullMl),
            "pairwise" | "pair" => Ok(EstimatorKind::PairwiseMl),
            "hyv" => Ok(EstimatorKind::HyvarinenUnivariate),
            "hyv-wishart" | "wishart" => Ok(EstimatorKind::HyvarinenWishart),
            other => Err(Error::Config(format!(
                "unknown estimator `{other}` (expected full, pairwise, hyv or hyv-wishart)"
            ))),
        }
    }
}

fn require_len(y: &[f64], min: usize) -> Result<()> {
    if y.len() < min {
        return Err(Error::domain(format!("series length {} below the minimum {min}", y.len())));
    }
    Ok(())
}

/// Exact stationary AR(1) log-likelihood, constants dropped.
pub fn ar1_full_loglik(y: &[f64], p: &Ar1Params) -> Result<f64> {
    p.validate()?;
    require_len(y, 2)?;
    let (mu, phi, s2) = (p.mu, p.phi, p.sigma2);
    let t = y.len();
    let sum_sq: f64 = y.iter().map(|v| (v - mu).powi(2)).sum();
    let inner_sq: f64 = y[1..t - 1].iter().map(|v| (v - mu).powi(2)).sum();
    let lag: f64 = y.windows(2).map(|w| (w[1] - mu) * (w[0] - mu)).sum();
    let quad = sum_sq + phi * phi * inner_sq - 2.0 * phi * lag;
    Ok(-quad / (2.0 * s2) - 0.5 * t as f64 * s2.ln() + 0.5 * (1.0 - phi * phi).ln())
}

/// Consecutive-pairs AR(1) log-likelihood.
pub fn ar1_pairwise_loglik(y: &[f64], p: &Ar1Params) -> Result<f64> {
    p.validate()?;
    require_len(y, 2)?;
    let (mu, phi, s2) = (p.mu, p.phi, p.sigma2);
    let pairs = (y.len() - 1) as f64;
    let quad: f64 = y
        .windows(2)
        .map(|w| {
            let (a, b) = (w[1] - mu, w[0] - mu);
            a * a + b * b - 2.0 * phi * a * b
        })
        .sum();
    Ok(-quad / (2.0 * s2) - pairs * s2.ln() + 0.5 * pairs * (1.0 - phi * phi).ln())
}

/// Joint pairwise maximizer in `(phi, sigma2)` for zero-mean AR(1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairwiseClosedForm {
    pub phi: f64,
    pub sigma2: f64,
    /// `|phi| >= 1`: the estimate sits on or beyond the stationarity bound.
    pub boundary: bool,
}

/// `phi = 2 sum y_t y_{t-1} / sum (y_t^2 + y_{t-1}^2)` (Yule-Walker form) and
/// `sigma2 = sum (y_t^2 + y_{t-1}^2) / (2 nu (T-1)) * (1 - phi^2)`, pooled
/// over every series and every `t = 2..T`.
pub fn ar1_pairwise_closed_form(y: &SeriesMatrix) -> Result<PairwiseClosedForm> {
    if y.t_len() < 2 {
        return Err(Error::domain("closed-form pairwise estimator needs T >= 2"));
    }
    let (mut cross, mut squares) = (0.0, 0.0);
    for row in y.rows() {
        for w in row.windows(2) {
            cross += w[1] * w[0];
            squares += w[1] * w[1] + w[0] * w[0];
        }
    }
    if squares == 0.0 {
        return Err(Error::Degenerate("all lagged squares are zero".into()));
    }
    let phi = 2.0 * cross / squares;
    let n_pairs = (y.nu() * (y.t_len() - 1)) as f64;
    let sigma2 = squares / (2.0 * n_pairs) * (1.0 - phi * phi);
    Ok(PairwiseClosedForm {
        phi,
        sigma2,
        boundary: phi.abs() >= 1.0,
    })
}

/// Closed-form AR(1) Hyvärinen score (tridiagonal precision).
pub fn ar1_hyvarinen(y: &[f64], p: &Ar1Params) -> Result<f64> {
    p.validate()?;
    require_len(y, 3)?;
    let (mu, phi, s2) = (p.mu, p.phi, p.sigma2);
    let t = y.len();
    let c = 1.0 + phi * phi;
    let interior: f64 = y
        .windows(3)
        .map(|w| (c * (w[1] - mu) - phi * (w[0] + w[2] - 2.0 * mu)).powi(2))
        .sum();
    let first = (y[0] - mu - phi * (y[1] - mu)).powi(2);
    let last = (y[t - 1] - mu - phi * (y[t - 2] - mu)).powi(2);
    let trace = (2.0 + (t - 2) as f64 * c) / s2;
    Ok((interior + first + last) / (2.0 * s2 * s2) - trace)
}

/// Hyvärinen score of `N(mu 1, precision^{-1})` at `y`:
/// `-tr(P) + 1/2 |P (y - mu)|^2`.
pub fn gaussian_hyvarinen(y: &[f64], precision: &SymMatrix, mu: f64) -> Result<f64> {
    if y.len() != precision.dim() {
        return Err(Error::Dimension {
            expected: precision.dim(),
            got: y.len(),
        });
    }
    let centered: Vec<f64> = y.iter().map(|v| v - mu).collect();
    let grad = precision.mul_vec(&centered)?;
    Ok(-precision.trace() + 0.5 * grad.iter().map(|g| g * g).sum::<f64>())
}

/// `-1/2 log|Omega| - 1/2 (y - mu)' Omega^{-1} (y - mu)`.
pub fn ma1_full_loglik(y: &[f64], p: &Ma1Params) -> Result<f64> {
    let t = y.len();
    require_len(y, 1)?;
    let log_det = ma1_covariance(p, t)?.cholesky().map_err(|e| Error::domain(e.to_string()))?.log_det();
    let prec = ma1_precision(p, t)?;
    Ok(ma1_loglik_prepared(y, p.mu, &prec, log_det))
}

fn ma1_loglik_prepared(y: &[f64], mu: f64, prec: &SymMatrix, log_det: f64) -> f64 {
    let centered: Vec<f64> = y.iter().map(|v| v - mu).collect();
    let mut quad = 0.0;
    for (i, ci) in centered.iter().enumerate() {
        quad += ci * prec.row(i).iter().zip(&centered).map(|(a, b)| a * b).sum::<f64>();
    }
    -0.5 * log_det - 0.5 * quad
}

/// Consecutive-pairs MA(1) log-likelihood.
pub fn ma1_pairwise_loglik(y: &[f64], p: &Ma1Params) -> Result<f64> {
    p.validate()?;
    require_len(y, 2)?;
    let (mu, a, s2) = (p.mu, p.alpha, p.sigma2);
    let a2 = a * a;
    let det = 1.0 + a2 + a2 * a2;
    let pairs = (y.len() - 1) as f64;
    let quad: f64 = y
        .windows(2)
        .map(|w| {
            let (u, v) = (w[1] - mu, w[0] - mu);
            ((u * u + v * v) * (1.0 + a2) - 2.0 * u * v * a) / det
        })
        .sum();
    Ok(-quad / (2.0 * s2) - 0.5 * pairs * det.ln() - pairs * s2.ln())
}

pub fn ma1_hyvarinen(y: &[f64], p: &Ma1Params) -> Result<f64> {
    let prec = ma1_precision(p, y.len())?;
    gaussian_hyvarinen(y, &prec, p.mu)
}

/// Per-series objective (minimization sign) with the parameter-dependent
/// pieces computed once.
#[derive(Clone, Debug)]
pub struct SeriesScorer {
    kind: EstimatorKind,
    t_len: usize,
    prepared: Prepared,
}

#[derive(Clone, Debug)]
enum Prepared {
    Ar1(Ar1Params),
    Ma1Full { mu: f64, precision: SymMatrix, log_det: f64 },
    Ma1Pairwise(Ma1Params),
    Ma1Hyvarinen { mu: f64, precision: SymMatrix },
}

impl SeriesScorer {
    pub fn new(kind: EstimatorKind, model: &LinearModel, theta: f64, t_len: usize) -> Result<Self> {
        if !kind.is_per_series() {
            return Err(Error::UnsupportedKind(kind));
        }
        let prepared = match model.kind {
            ModelKind::Ar1 => Prepared::Ar1(model.ar1_params(theta)?),
            ModelKind::Ma1 => {
                let p = model.ma1_params(theta)?;
                match kind {
                    EstimatorKind::FullMl => {
                        let log_det = ma1_covariance(&p, t_len)?
                            .cholesky()
                            .map_err(|e| Error::domain(e.to_string()))?
                            .log_det();
                        Prepared::Ma1Full {
                            mu: p.mu,
                            precision: ma1_precision(&p, t_len)?,
                            log_det,
                        }
                    }
                    EstimatorKind::PairwiseMl => Prepared::Ma1Pairwise(p),
                    _ => Prepared::Ma1Hyvarinen {
                        mu: p.mu,
                        precision: ma1_precision(&p, t_len)?,
                    },
                }
            }
        };
        Ok(Self { kind, t_len, prepared })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.t_len {
            return Err(Error::Dimension {
                expected: self.t_len,
                got: y.len(),
            });
        }
        match (&self.prepared, self.kind) {
            (Prepared::Ar1(p), EstimatorKind::FullMl) => ar1_full_loglik(y, p).map(|v| -v),
            (Prepared::Ar1(p), EstimatorKind::PairwiseMl) => ar1_pairwise_loglik(y, p).map(|v| -v),
            (Prepared::Ar1(p), _) => ar1_hyvarinen(y, p),
            (Prepared::Ma1Full { mu, precision, log_det }, _) => {
                Ok(-ma1_loglik_prepared(y, *mu, precision, *log_det))
            }
            (Prepared::Ma1Pairwise(p), _) => ma1_pairwise_loglik(y, p).map(|v| -v),
            (Prepared::Ma1Hyvarinen { mu, precision }, _) => gaussian_hyvarinen(y, precision, *mu),
        }
    }
}

/// Objective of every row of `y` at `theta`, minimization sign.
pub fn per_series_objectives(
    y: &SeriesMatrix,
    kind: EstimatorKind,
    model: &LinearModel,
    theta: f64,
) -> Result<Vec<f64>> {
    let scorer = SeriesScorer::new(kind, model, theta, y.t_len())?;
    y.rows().map(|row| scorer.eval(row)).collect()
}

/// Total empirical objective `sum_i S(y_i, theta)`, minimization sign.
pub fn total_score(y: &SeriesMatrix, kind: EstimatorKind, model: &LinearModel, theta: f64) -> Result<f64> {
    Ok(per_series_objectives(y, kind, model, theta)?.iter().sum())
}
