//! Bounded scalar minimization: a coarse grid picks the basin, Brent's
//! parabolic/golden-section search refines it.

use crate::error::{Error, Result};

/// Parameter search interval is `(-SEARCH_BOUND, SEARCH_BOUND)`.
pub const SEARCH_BOUND: f64 = 0.999;
pub const SEARCH_TOL: f64 = 1e-6;
pub const GRID_POINTS: usize = 64;

const GOLDEN: f64 = 0.381_966_011_250_105_1;

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Brent's method on `[a, b]`; returns `(x, f(x))`.
pub fn brent(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let f = |x: f64| sanitize(f(x));
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);

    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = 0.5 * tol.max(1e-12) + f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Minimize `f` over `[lo, hi]`.
///
/// A 64-point grid (endpoints included) seeds the search; Brent then refines
/// inside the two grid cells around the best grid point. For unimodal `f`
/// the result is within `tol` of the minimizer.
pub fn minimize_scalar(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Minimizer(format!("invalid interval ({lo}, {hi})")));
    }
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid_x = |k: usize| if k == GRID_POINTS - 1 { hi } else { lo + k as f64 * step };
    let mut best: Option<(usize, f64)> = None;
    for k in 0..GRID_POINTS {
        let v = f(grid_x(k));
        if v.is_finite() && best.is_none_or(|(_, fb)| v < fb) {
            best = Some((k, v));
        }
    }
    let (k, f_grid) = best.ok_or_else(|| Error::Minimizer("objective is non-finite at every grid point".into()))?;
    let a = grid_x(k.saturating_sub(1));
    let b = grid_x((k + 1).min(GRID_POINTS - 1));
    let (x, fx) = brent(&f, a, b, tol);
    if fx <= f_grid {
        Ok(x)
    } else {
        Ok(grid_x(k))
    }
}

/// True when `x` sits at an edge of the search interval.
pub fn at_search_edge(x: f64) -> bool {
    x.abs() >= SEARCH_BOUND - 10.0 * SEARCH_TOL
}
