//! Hyvärinen score of the Wishart law of `S = Y^T Y`.
//!
//! With `c = nu - T - 1`, `s^{ij}` the entries of `S^{-1}` and `l^{ij}` the
//! entries of the model precision `Lambda^{-1}`:
//!
//! ```text
//! HW   = -(c/2) sum_i (s^{ii})^2 + 1/2 sum_{i,j} (c/2 s^{ij} - 1/2 l^{ij})^2
//! HW_l = -1/2 sum_{i,j} (c/2 s^{ij} - 1/2 l^{ij}) dl^{ij}/dl
//! K    = 1/4 sum_{i,j} (dl^{ij}/dl)^2
//! ```
//!
//! Both double sums run over all ordered pairs `(i, j)`.

use crate::error::{Error, Result};
use crate::inference::optimize::{minimize_scalar, SEARCH_BOUND, SEARCH_TOL};
use crate::matrix::SymMatrix;
use crate::models::{sum_of_squares, LinearModel, SeriesMatrix};

/// Inverted sufficient statistic plus the parameter-to-scale mapping.
#[derive(Clone, Debug)]
pub struct WishartContext {
    nu: usize,
    t_len: usize,
    s_inv: SymMatrix,
    model: LinearModel,
}

impl WishartContext {
    /// Requires `nu >= T + 2` and a positive-definite `S`.
    pub fn new(s: &SymMatrix, nu: usize, model: LinearModel) -> Result<Self> {
        let t_len = s.dim();
        if nu < t_len + 2 {
            return Err(Error::domain(format!(
                "Wishart score needs nu >= T + 2 (nu = {nu}, T = {t_len})"
            )));
        }
        let s_inv = s
            .inverse()
            .map_err(|e| Error::Degenerate(format!("sum-of-squares matrix is singular: {e}")))?;
        Ok(Self {
            nu,
            t_len,
            s_inv,
            model,
        })
    }

    pub fn from_series(y: &SeriesMatrix, model: LinearModel) -> Result<Self> {
        Self::new(&sum_of_squares(y), y.nu(), model)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn t_len(&self) -> usize {
        self.t_len
    }

    pub fn model(&self) -> &LinearModel {
        &self.model
    }

    pub fn s_inv(&self) -> &SymMatrix {
        &self.s_inv
    }

    /// `nu - T - 1`.
    pub fn dof_excess(&self) -> f64 {
        (self.nu - self.t_len - 1) as f64
    }

    fn check_dim(&self, m: &SymMatrix) -> Result<()> {
        if m.dim() != self.t_len {
            return Err(Error::Dimension {
                expected: self.t_len,
                got: m.dim(),
            });
        }
        Ok(())
    }
}

/// Score for an explicit precision matrix `Lambda^{-1}`.
pub fn hw_score_with_precision(ctx: &WishartContext, precision: &SymMatrix) -> Result<f64> {
    ctx.check_dim(precision)?;
    let c = ctx.dof_excess();
    let s = &ctx.s_inv;
    let diag: f64 = (0..ctx.t_len).map(|i| s.get(i, i).powi(2)).sum();
    let resid: f64 = s
        .as_slice()
        .iter()
        .zip(precision.as_slice())
        .map(|(sij, lij)| (0.5 * c * sij - 0.5 * lij).powi(2))
        .sum();
    Ok(-0.5 * c * diag + 0.5 * resid)
}

pub fn hw_score(ctx: &WishartContext, lambda: f64) -> Result<f64> {
    let prec = ctx.model.precision(lambda, ctx.t_len)?;
    hw_score_with_precision(ctx, &prec)
}

/// Derivative in the scalar parameter given `precision` and its derivative.
pub fn hw_grad_with_precision(ctx: &WishartContext, precision: &SymMatrix, dprec: &SymMatrix) -> Result<f64> {
    ctx.check_dim(precision)?;
    ctx.check_dim(dprec)?;
    let c = ctx.dof_excess();
    let sum: f64 = ctx
        .s_inv
        .as_slice()
        .iter()
        .zip(precision.as_slice())
        .zip(dprec.as_slice())
        .map(|((sij, lij), dij)| (0.5 * c * sij - 0.5 * lij) * dij)
        .sum();
    Ok(-0.5 * sum)
}

/// `dprec` is the elementwise derivative of the precision at `lambda`, e.g.
/// from [`LinearModel::precision_derivative`].
pub fn hw_grad(ctx: &WishartContext, lambda: f64, dprec: &SymMatrix) -> Result<f64> {
    let prec = ctx.model.precision(lambda, ctx.t_len)?;
    hw_grad_with_precision(ctx, &prec, dprec)
}

/// Expected curvature `1/4 sum_{i,j} (dl^{ij}/dl)^2` for any parameterization.
pub fn sensitivity_from_derivative(dprec: &SymMatrix) -> f64 {
    0.25 * dprec.as_slice().iter().map(|d| d * d).sum::<f64>()
}

/// `K(phi) = (T - 1 + 2 phi^2 (T - 2)) / 2` for AR(1) with unit innovation variance.
pub fn k_analytic_ar1(phi: f64, t_len: usize) -> Result<f64> {
    if !(phi.abs() < 1.0) {
        return Err(Error::domain(format!("|phi| must be < 1, got {phi}")));
    }
    if t_len < 2 {
        return Err(Error::domain("analytic sensitivity needs T >= 2"));
    }
    let t = t_len as f64;
    Ok((t - 1.0 + 2.0 * phi * phi * (t - 2.0)) / 2.0)
}

/// Minimizer of [`hw_score`] over the open parameter interval.
pub fn hw_estimate(y: &SeriesMatrix, model: &LinearModel) -> Result<f64> {
    let ctx = WishartContext::from_series(y, *model)?;
    hw_estimate_ctx(&ctx)
}

pub fn hw_estimate_ctx(ctx: &WishartContext) -> Result<f64> {
    minimize_scalar(
        |lambda| hw_score(ctx, lambda).unwrap_or(f64::NAN),
        -SEARCH_BOUND,
        SEARCH_BOUND,
        SEARCH_TOL,
    )
}
