//! Central finite differences.

use crate::error::{Error, Result};

/// `cbrt(eps) * max(1, |x|)`.
pub fn grad_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

/// `eps^(1/4) * max(1, |x|)`.
pub fn hess_step(x: f64) -> f64 {
    f64::EPSILON.powf(0.25) * x.abs().max(1.0)
}

fn finite_at(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(x))
    }
}

/// `(f(x + h) - f(x - h)) / 2h`, default step [`grad_step`].
pub fn num_grad(f: impl Fn(f64) -> f64, x: f64, h: Option<f64>) -> Result<f64> {
    let h = h.unwrap_or_else(|| grad_step(x));
    let (xp, xm) = (x + h, x - h);
    let (fp, fm) = (finite_at(xp, f(xp))?, finite_at(xm, f(xm))?);
    Ok((fp - fm) / (xp - xm))
}

/// `(f(x + h) - 2 f(x) + f(x - h)) / h^2`, default step [`hess_step`].
pub fn num_hess(f: impl Fn(f64) -> f64, x: f64, h: Option<f64>) -> Result<f64> {
    let h = h.unwrap_or_else(|| hess_step(x));
    let fp = finite_at(x + h, f(x + h))?;
    let f0 = finite_at(x, f(x))?;
    let fm = finite_at(x - h, f(x - h))?;
    Ok((fp - 2.0 * f0 + fm) / (h * h))
}

/// Per-element first and second central differences of a vector-valued
/// function, for per-series score vectors.
pub(crate) fn vector_derivatives<F>(f: F, x: f64) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let hg = grad_step(x);
    let hh = hess_step(x);
    let gp = f(x + hg)?;
    let gm = f(x - hg)?;
    let hp = f(x + hh)?;
    let h0 = f(x)?;
    let hm = f(x - hh)?;
    let width = (x + hg) - (x - hg);
    let mut grad = Vec::with_capacity(h0.len());
    let mut hess = Vec::with_capacity(h0.len());
    for i in 0..h0.len() {
        let g = (gp[i] - gm[i]) / width;
        let h = (hp[i] - 2.0 * h0[i] + hm[i]) / (hh * hh);
        if !g.is_finite() || !h.is_finite() {
            return Err(Error::NonFinite(x));
        }
        grad.push(g);
        hess.push(h);
    }
    Ok((grad, hess))
}
