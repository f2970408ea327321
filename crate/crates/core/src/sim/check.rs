//! Quick oracle checks behind `minscore check`.

use crate::error::Result;
use crate::inference::numdiff::{num_grad, vector_derivatives};
use crate::matrix::SymMatrix;
use crate::models::{
    ar1_covariance, ar1_precision, ar1_precision_derivative, ma1_covariance, ma1_precision, Ar1Params,
    LinearModel, Ma1Params, ModelKind,
};
use crate::scoring::{
    ar1_hyvarinen, ar1_pairwise_closed_form, gaussian_hyvarinen, ma1_hyvarinen, per_series_objectives,
    EstimatorKind,
};
use crate::wishart::{hw_grad, hw_score, k_analytic_ar1, sensitivity_from_derivative, WishartContext};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

const PARAMS: [f64; 5] = [-0.9, -0.5, 0.0, 0.5, 0.9];

fn precision_vs_inverse() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for t in 1..=20 {
        for &th in &PARAMS {
            let ar = Ar1Params::new(0.0, 1.3, th)?;
            let ma = Ma1Params::new(0.0, 0.7, th)?;
            worst = worst.max(ar1_precision(&ar, t)?.max_abs_diff(&ar1_covariance(&ar, t)?.inverse()?));
            worst = worst.max(ma1_precision(&ma, t)?.max_abs_diff(&ma1_covariance(&ma, t)?.inverse()?));
        }
    }
    Ok(CheckOutcome::new(
        "precision matrices match dense inversion",
        worst <= 1e-10,
        format!("max abs diff {worst:.2e} (tol 1e-10)"),
    ))
}

fn closed_form_hyvarinen() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for t in 3..=20 {
        let y: Vec<f64> = (0..t).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
        for &th in &PARAMS {
            let ar = Ar1Params::new(0.2, 1.4, th)?;
            let ma = Ma1Params::new(-0.1, 0.8, th)?;
            let a = ar1_hyvarinen(&y, &ar)? - gaussian_hyvarinen(&y, &ar1_precision(&ar, t)?, ar.mu)?;
            let m = ma1_hyvarinen(&y, &ma)? - gaussian_hyvarinen(&y, &ma1_precision(&ma, t)?, ma.mu)?;
            worst = worst.max(a.abs()).max(m.abs());
        }
    }
    Ok(CheckOutcome::new(
        "closed-form Hyvarinen scores match the Gaussian form",
        worst <= 1e-8,
        format!("max abs diff {worst:.2e} (tol 1e-8)"),
    ))
}

fn wishart_sensitivity() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for t in 2..=30 {
        for &phi in &PARAMS {
            let d = ar1_precision_derivative(&Ar1Params::new(0.0, 1.0, phi)?, t)?;
            let mut brute = 0.0;
            for i in 0..t {
                for j in 0..t {
                    brute += 0.25 * d.get(j, i).powi(2);
                }
            }
            worst = worst.max((k_analytic_ar1(phi, t)? - brute).abs());
        }
    }
    Ok(CheckOutcome::new(
        "AR(1) Wishart sensitivity closed form",
        worst <= 1e-10,
        format!("max abs diff {worst:.2e} (tol 1e-10)"),
    ))
}

fn wishart_gradient() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for kind in [ModelKind::Ar1, ModelKind::Ma1] {
        let model = LinearModel::standard(kind);
        let y = model.sample(0.4, 30, 8, 11)?;
        let ctx = WishartContext::from_series(&y, model)?;
        for th in [-0.6, -0.1, 0.3, 0.7] {
            let analytic = hw_grad(&ctx, th, &model.precision_derivative(th, 8)?)?;
            let numeric = num_grad(|x| hw_score(&ctx, x).unwrap_or(f64::NAN), th, None)?;
            worst = worst.max((analytic - numeric).abs() / numeric.abs().max(1.0));
        }
    }
    Ok(CheckOutcome::new(
        "Wishart score gradient matches finite differences",
        worst <= 1e-4,
        format!("max relative diff {worst:.2e} (tol 1e-4)"),
    ))
}

fn pairwise_sigma2() -> Result<CheckOutcome> {
    let model = LinearModel::new(ModelKind::Ar1, 0.0, 1.5);
    let y = model.sample(0.5, 2000, 50, 2024)?;
    let cf = ar1_pairwise_closed_form(&y)?;
    let err = (cf.sigma2 - 1.5).abs();
    Ok(CheckOutcome::new(
        "closed-form pairwise sigma^2 is consistent",
        err <= 0.02,
        format!("sigma2_hat = {:.4} vs 1.5 (tol 0.02)", cf.sigma2),
    ))
}

/// Mean per-unit gradient at the true value, in standard errors.
fn gradient_z(model: &LinearModel, kind: EstimatorKind, theta: f64, seed: u64) -> Result<f64> {
    let grads: Vec<f64> = if kind.is_per_series() {
        let y = model.sample(theta, 2000, 10, seed)?;
        vector_derivatives(|th| per_series_objectives(&y, kind, model, th), theta)?.0
    } else {
        let dprec = model.precision_derivative(theta, 6)?;
        (0..400)
            .map(|b| {
                let y = model.sample(theta, 30, 6, seed.wrapping_add(b))?;
                hw_grad(&WishartContext::from_series(&y, *model)?, theta, &dprec)
            })
            .collect::<Result<_>>()?
    };
    let n = grads.len() as f64;
    let m = grads.iter().sum::<f64>() / n;
    let v = grads.iter().map(|g| (g - m).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(m / (v / n).sqrt())
}

fn unbiasedness() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    let mut seed = 500;
    for kind in [ModelKind::Ar1, ModelKind::Ma1] {
        let model = LinearModel::standard(kind);
        for est in EstimatorKind::ALL {
            for th in [-0.5, 0.0, 0.5] {
                seed += 1;
                worst = worst.max(gradient_z(&model, est, th, seed)?.abs());
            }
        }
    }
    Ok(CheckOutcome::new(
        "score estimating equations are unbiased",
        worst <= 5.0,
        format!("max |z| {worst:.2} (tol 5)"),
    ))
}

fn symmetric_derivative() -> Result<CheckOutcome> {
    let model = LinearModel::standard(ModelKind::Ma1);
    let d: SymMatrix = model.precision_derivative(0.3, 10)?;
    let k = sensitivity_from_derivative(&d);
    Ok(CheckOutcome::new(
        "MA(1) precision derivative is symmetric",
        d.is_exactly_symmetric() && k > 0.0,
        format!("K = {k:.4}"),
    ))
}

type CheckFn = fn() -> Result<CheckOutcome>;

const CHECKS: [(&str, CheckFn); 7] = [
    ("precision matrices match dense inversion", precision_vs_inverse),
    ("closed-form Hyvarinen scores match the Gaussian form", closed_form_hyvarinen),
    ("AR(1) Wishart sensitivity closed form", wishart_sensitivity),
    ("Wishart score gradient matches finite differences", wishart_gradient),
    ("MA(1) precision derivative is symmetric", symmetric_derivative),
    ("closed-form pairwise sigma^2 is consistent", pairwise_sigma2),
    ("score estimating equations are unbiased", unbiasedness),
];

/// Run every check; an error inside a check counts as a failure.
pub fn run_checks() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, f)| f().unwrap_or_else(|e| CheckOutcome::new(name, false, format!("error: {e}"))))
        .collect()
}
