//! Stationary Gaussian AR(1) and MA(1) processes: parameters, covariance and
//! precision matrices, replicated-series samplers and the sum-of-squares
//! statistic.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::rng::rng_from_seed;

fn check_common(sigma2: f64, coef: f64, coef_name: &str) -> Result<()> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::domain(format!("sigma2 must be positive, got {sigma2}")));
    }
    if !(coef.abs() < 1.0) {
        return Err(Error::domain(format!("|{coef_name}| must be < 1, got {coef}")));
    }
    Ok(())
}

fn check_len(t_len: usize) -> Result<()> {
    if t_len == 0 {
        return Err(Error::domain("series length must be at least 1"));
    }
    Ok(())
}

/// `y_t - mu = phi (y_{t-1} - mu) + z_t`, `z_t ~ N(0, sigma2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ar1Params {
    pub mu: f64,
    pub sigma2: f64,
    pub phi: f64,
}

impl Ar1Params {
    pub fn new(mu: f64, sigma2: f64, phi: f64) -> Result<Self> {
        let p = Self { mu, sigma2, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_common(self.sigma2, self.phi, "phi")
    }

    /// Marginal variance `sigma2 / (1 - phi^2)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma2 / (1.0 - self.phi * self.phi)
    }
}

/// `y_t - mu = alpha z_{t-1} + z_t`, `z_t ~ N(0, sigma2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ma1Params {
    pub mu: f64,
    pub sigma2: f64,
    pub alpha: f64,
}

impl Ma1Params {
    pub fn new(mu: f64, sigma2: f64, alpha: f64) -> Result<Self> {
        let p = Self { mu, sigma2, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_common(self.sigma2, self.alpha, "alpha")
    }
}

pub fn ar1_covariance(p: &Ar1Params, t_len: usize) -> Result<SymMatrix> {
    p.validate()?;
    check_len(t_len)?;
    let v = p.stationary_variance();
    Ok(SymMatrix::from_upper_fn(t_len, |i, j| v * p.phi.powi((j - i) as i32)))
}

/// Tridiagonal inverse of [`ar1_covariance`].
///
/// Off-diagonal `-phi`, diagonal `1 + phi^2` except the two corners which
/// are `1`, everything over `sigma2`. For `T = 1` the single entry is the
/// scalar inverse `(1 - phi^2) / sigma2`.
pub fn ar1_precision(p: &Ar1Params, t_len: usize) -> Result<SymMatrix> {
    p.validate()?;
    check_len(t_len)?;
    let phi = p.phi;
    let s = p.sigma2;
    if t_len == 1 {
        return Ok(SymMatrix::from_upper_fn(1, |_, _| (1.0 - phi * phi) / s));
    }
    let last = t_len - 1;
    Ok(SymMatrix::from_upper_fn(t_len, |i, j| {
        if i == j {
            if i == 0 || i == last {
                1.0 / s
            } else {
                (1.0 + phi * phi) / s
            }
        } else if j == i + 1 {
            -phi / s
        } else {
            0.0
        }
    }))
}

/// Derivative of [`ar1_precision`] with respect to `phi`.
pub fn ar1_precision_derivative(p: &Ar1Params, t_len: usize) -> Result<SymMatrix> {
    p.validate()?;
    check_len(t_len)?;
    let s = p.sigma2;
    if t_len == 1 {
        return Ok(SymMatrix::from_upper_fn(1, |_, _| -2.0 * p.phi / s));
    }
    let last = t_len - 1;
    Ok(SymMatrix::from_upper_fn(t_len, |i, j| {
        if i == j {
            if i == 0 || i == last {
                0.0
            } else {
                2.0 * p.phi / s
            }
        } else if j == i + 1 {
            -1.0 / s
        } else {
            0.0
        }
    }))
}

pub fn ma1_covariance(p: &Ma1Params, t_len: usize) -> Result<SymMatrix> {
    p.validate()?;
    check_len(t_len)?;
    let (a, s) = (p.alpha, p.sigma2);
    Ok(SymMatrix::from_upper_fn(t_len, |i, j| match j - i {
        0 => s * (1.0 + a * a),
        1 => s * a,
        _ => 0.0,
    }))
}

/// Closed-form inverse of [`ma1_covariance`]:
///
/// `w^{ij} = (-a)^{j-i} g(i-1) g(T-j) / (g(T) sigma2)` for `j >= i` (1-based),
/// with `g(k) = 1 + a^2 + ... + a^{2k}`.
pub fn ma1_precision(p: &Ma1Params, t_len: usize) -> Result<SymMatrix> {
    p.validate()?;
    check_len(t_len)?;
    let a2 = p.alpha * p.alpha;
    // g[k] = sum_{m=0}^{k} a^{2m}, summed directly (no closed form near |a| = 1).
    let mut g = Vec::with_capacity(t_len + 1);
    let mut term = 1.0;
    let mut acc = 0.0;
    for _ in 0..=t_len {
        acc += term;
        g.push(acc);
        term *= a2;
    }
    let denom = g[t_len] * p.sigma2;
    let neg_a = -p.alpha;
    // 0-based i <= j: g(i) g(T-1-j) (-a)^{j-i}.
    Ok(SymMatrix::from_upper_fn(t_len, |i, j| {
        neg_a.powi((j - i) as i32) * g[i] * g[t_len - 1 - j] / denom
    }))
}

/// Replicated series: `nu` rows of length `t_len`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    nu: usize,
    t_len: usize,
    data: Vec<f64>,
}

impl SeriesMatrix {
    pub fn new(nu: usize, t_len: usize, data: Vec<f64>) -> Result<Self> {
        if nu == 0 || t_len == 0 {
            return Err(Error::domain("series matrix needs nu >= 1 and T >= 1"));
        }
        if data.len() != nu * t_len {
            return Err(Error::Dimension {
                expected: nu * t_len,
                got: data.len(),
            });
        }
        Ok(Self { nu, t_len, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nu = rows.len();
        let t_len = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nu * t_len);
        for r in rows {
            if r.len() != t_len {
                return Err(Error::Dimension {
                    expected: t_len,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(nu, t_len, data)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn t_len(&self) -> usize {
        self.t_len
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.t_len..(i + 1) * self.t_len]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.t_len)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// `nu` independent stationary AR(1) paths, each started from the marginal law.
pub fn sample_ar1(p: &Ar1Params, nu: usize, t_len: usize, seed: u64) -> Result<SeriesMatrix> {
    p.validate()?;
    check_len(t_len)?;
    let mut rng = rng_from_seed(seed);
    let sd = p.sigma2.sqrt();
    let sd0 = p.stationary_variance().sqrt();
    let mut data = Vec::with_capacity(nu * t_len);
    for _ in 0..nu {
        let z: f64 = rng.sample(StandardNormal);
        let mut dev = sd0 * z;
        data.push(p.mu + dev);
        for _ in 1..t_len {
            let z: f64 = rng.sample(StandardNormal);
            dev = p.phi * dev + sd * z;
            data.push(p.mu + dev);
        }
    }
    SeriesMatrix::new(nu, t_len, data)
}

/// `nu` independent MA(1) paths driven by `z_0, ..., z_T`.
pub fn sample_ma1(p: &Ma1Params, nu: usize, t_len: usize, seed: u64) -> Result<SeriesMatrix> {
    p.validate()?;
    check_len(t_len)?;
    let mut rng = rng_from_seed(seed);
    let sd = p.sigma2.sqrt();
    let mut data = Vec::with_capacity(nu * t_len);
    for _ in 0..nu {
        let z0: f64 = rng.sample(StandardNormal);
        let mut prev = sd * z0;
        for _ in 0..t_len {
            let z: f64 = rng.sample(StandardNormal);
            let cur = sd * z;
            data.push(p.mu + p.alpha * prev + cur);
            prev = cur;
        }
    }
    SeriesMatrix::new(nu, t_len, data)
}

/// `S = Y^T Y`, the `T x T` sum-of-squares-and-products matrix.
pub fn sum_of_squares(y: &SeriesMatrix) -> SymMatrix {
    let t = y.t_len();
    let mut upper = vec![0.0; t * t];
    for row in y.rows() {
        for i in 0..t {
            let yi = row[i];
            let dst = &mut upper[i * t + i..(i + 1) * t];
            for (d, &yj) in dst.iter_mut().zip(&row[i..]) {
                *d += yi * yj;
            }
        }
    }
    SymMatrix::from_upper_fn(t, |i, j| upper[i * t + j])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    Ar1,
    Ma1,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Ar1 => "ar1",
            ModelKind::Ma1 => "ma1",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ar1" => Ok(ModelKind::Ar1),
            "ma1" => Ok(ModelKind::Ma1),
            other => Err(Error::Config(format!("unknown model `{other}` (expected ar1 or ma1)"))),
        }
    }
}

/// One-parameter family: `phi` (AR) or `alpha` (MA) free, `mu` and `sigma2` known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearModel {
    pub kind: ModelKind,
    pub mu: f64,
    pub sigma2: f64,
}

impl LinearModel {
    pub fn new(kind: ModelKind, mu: f64, sigma2: f64) -> Self {
        Self { kind, mu, sigma2 }
    }

    /// Zero mean, unit innovation variance.
    pub fn standard(kind: ModelKind) -> Self {
        Self::new(kind, 0.0, 1.0)
    }

    pub fn ar1_params(&self, phi: f64) -> Result<Ar1Params> {
        Ar1Params::new(self.mu, self.sigma2, phi)
    }

    pub fn ma1_params(&self, alpha: f64) -> Result<Ma1Params> {
        Ma1Params::new(self.mu, self.sigma2, alpha)
    }

    pub fn covariance(&self, theta: f64, t_len: usize) -> Result<SymMatrix> {
        match self.kind {
            ModelKind::Ar1 => ar1_covariance(&self.ar1_params(theta)?, t_len),
            ModelKind::Ma1 => ma1_covariance(&self.ma1_params(theta)?, t_len),
        }
    }

    pub fn precision(&self, theta: f64, t_len: usize) -> Result<SymMatrix> {
        match self.kind {
            ModelKind::Ar1 => ar1_precision(&self.ar1_params(theta)?, t_len),
            ModelKind::Ma1 => ma1_precision(&self.ma1_params(theta)?, t_len),
        }
    }

    /// Elementwise derivative of the precision matrix in the free parameter.
    ///
    /// Analytic for AR(1); central differences with step
    /// `1e-6 * max(1, |alpha|)` for MA(1).
    pub fn precision_derivative(&self, theta: f64, t_len: usize) -> Result<SymMatrix> {
        match self.kind {
            ModelKind::Ar1 => ar1_precision_derivative(&self.ar1_params(theta)?, t_len),
            ModelKind::Ma1 => {
                self.ma1_params(theta)?;
                let h = 1e-6 * theta.abs().max(1.0);
                let (lo, hi) = (theta - h, theta + h);
                if !(hi.abs() < 1.0 && lo.abs() < 1.0) {
                    return Err(Error::domain(format!("alpha = {theta} too close to the invertibility bound")));
                }
                let plus = ma1_precision(&self.ma1_params(hi)?, t_len)?;
                let minus = ma1_precision(&self.ma1_params(lo)?, t_len)?;
                let width = hi - lo;
                Ok(SymMatrix::from_upper_fn(t_len, |i, j| (plus.get(i, j) - minus.get(i, j)) / width))
            }
        }
    }

    pub fn sample(&self, theta: f64, nu: usize, t_len: usize, seed: u64) -> Result<SeriesMatrix> {
        match self.kind {
            ModelKind::Ar1 => sample_ar1(&self.ar1_params(theta)?, nu, t_len, seed),
            ModelKind::Ma1 => sample_ma1(&self.ma1_params(theta)?, nu, t_len, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn dense_inverse(m: &SymMatrix) -> Vec<Vec<f64>> {
        let n = m.dim();
        let d = DMatrix::from_row_slice(n, n, m.as_slice());
        let inv = d.try_inverse().expect("invertible");
        (0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect()
    }

    fn assert_rows_close(m: &SymMatrix, rows: &[Vec<f64>], tol: f64) {
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                assert_abs_diff_eq!(m.get(i, j), *v, epsilon = tol);
            }
        }
    }

    #[test]
    fn ar1_covariance_examples() {
        let white = ar1_covariance(&Ar1Params::new(0.0, 1.0, 0.0).unwrap(), 3).unwrap();
        assert_eq!(white, SymMatrix::identity(3));
        let half = ar1_covariance(&Ar1Params::new(0.0, 1.0, 0.5).unwrap(), 2).unwrap();
        assert_rows_close(&half, &[vec![4.0 / 3.0, 2.0 / 3.0], vec![2.0 / 3.0, 4.0 / 3.0]], 1e-15);
        let doubled = ar1_covariance(&Ar1Params::new(0.0, 2.0, 0.5).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(doubled.max_abs_diff(&half.scaled(2.0)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn parameter_bounds_are_domain_errors() {
        assert!(matches!(Ar1Params::new(0.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(Ar1Params::new(0.0, 0.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(Ma1Params::new(0.0, 1.0, -1.2), Err(Error::Domain(_))));
        let bad = Ar1Params { mu: 0.0, sigma2: 1.0, phi: 1.5 };
        assert!(ar1_covariance(&bad, 3).is_err());
        assert!(ar1_precision(&bad, 3).is_err());
        let bad = Ma1Params { mu: 0.0, sigma2: -1.0, alpha: 0.5 };
        assert!(ma1_covariance(&bad, 3).is_err());
        assert!(ma1_precision(&bad, 3).is_err());
    }

    #[test]
    fn ar1_precision_examples() {
        let p = Ar1Params::new(0.0, 1.0, 0.5).unwrap();
        let inv = dense_inverse(&ar1_covariance(&p, 2).unwrap());
        let prec = ar1_precision(&p, 2).unwrap();
        assert_rows_close(&prec, &inv, 1e-12);
        assert_rows_close(&prec, &[vec![1.0, -0.5], vec![-0.5, 1.0]], 1e-15);

        for t in [2, 5, 9] {
            let white = ar1_precision(&Ar1Params::new(0.0, 1.0, 0.0).unwrap(), t).unwrap();
            assert_eq!(white, SymMatrix::identity(t));
        }

        let p = Ar1Params::new(0.0, 1.0, 0.9).unwrap();
        let prec = ar1_precision(&p, 4).unwrap();
        let inv = dense_inverse(&ar1_covariance(&p, 4).unwrap());
        assert_rows_close(&prec, &inv, 1e-10);
        for (i, d) in [1.0, 1.81, 1.81, 1.0].into_iter().enumerate() {
            assert_abs_diff_eq!(prec.get(i, i), d, epsilon = 1e-12);
        }
        for i in 0..3 {
            assert_abs_diff_eq!(prec.get(i, i + 1), -0.9, epsilon = 1e-15);
        }
        assert_eq!(prec.get(0, 2), 0.0);
    }

    #[test]
    fn ar1_precision_single_observation() {
        let p = Ar1Params::new(0.0, 2.0, 0.6).unwrap();
        let prec = ar1_precision(&p, 1).unwrap();
        assert_abs_diff_eq!(prec.get(0, 0) * ar1_covariance(&p, 1).unwrap().get(0, 0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ma1_covariance_examples() {
        let c = ma1_covariance(&Ma1Params::new(0.0, 1.0, 0.5).unwrap(), 2).unwrap();
        assert_rows_close(&c, &[vec![1.25, 0.5], vec![0.5, 1.25]], 1e-15);
        let c = ma1_covariance(&Ma1Params::new(0.0, 1.0, 0.0).unwrap(), 3).unwrap();
        assert_eq!(c, SymMatrix::identity(3));
        let c = ma1_covariance(&Ma1Params::new(0.0, 1.0, -0.5).unwrap(), 3).unwrap();
        assert_rows_close(
            &c,
            &[vec![1.25, -0.5, 0.0], vec![-0.5, 1.25, -0.5], vec![0.0, -0.5, 1.25]],
            1e-15,
        );
    }

    #[test]
    fn ma1_precision_examples() {
        for a in [-0.9, 0.0, 0.3, 0.7] {
            let p = ma1_precision(&Ma1Params::new(0.0, 1.0, a).unwrap(), 1).unwrap();
            assert_abs_diff_eq!(p.get(0, 0), 1.0 / (1.0 + a * a), epsilon = 1e-15);
        }
        let p = Ma1Params::new(0.0, 1.0, 0.5).unwrap();
        let prec = ma1_precision(&p, 2).unwrap();
        // inverse of [[1.25, 0.5], [0.5, 1.25]], det 1.3125
        let det = 1.3125;
        assert_rows_close(&prec, &[vec![1.25 / det, -0.5 / det], vec![-0.5 / det, 1.25 / det]], 1e-15);
        assert_abs_diff_eq!(prec.get(0, 0), 0.952_380_952_380_952_4, epsilon = 1e-12);
        assert_abs_diff_eq!(prec.get(0, 1), -0.380_952_380_952_380_95, epsilon = 1e-12);
        let halved = ma1_precision(&Ma1Params::new(0.0, 2.0, 0.5).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(halved.max_abs_diff(&prec.scaled(0.5)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn precisions_match_dense_inversion() {
        for t in 1..=20 {
            for a in [-0.9, -0.5, 0.0, 0.5, 0.9] {
                let p = Ma1Params::new(0.0, 1.0, a).unwrap();
                let prec = ma1_precision(&p, t).unwrap();
                assert_rows_close(&prec, &dense_inverse(&ma1_covariance(&p, t).unwrap()), 1e-10);
                assert!(prec.is_exactly_symmetric());
                if t >= 2 {
                    let p = Ar1Params::new(0.0, 1.0, a).unwrap();
                    let prec = ar1_precision(&p, t).unwrap();
                    assert_rows_close(&prec, &dense_inverse(&ar1_covariance(&p, t).unwrap()), 1e-10);
                }
            }
        }
    }

    #[test]
    fn ar1_precision_derivative_matches_finite_difference() {
        let h = 1e-6;
        for phi in [-0.7, 0.0, 0.4] {
            let d = ar1_precision_derivative(&Ar1Params::new(0.0, 1.5, phi).unwrap(), 6).unwrap();
            let plus = ar1_precision(&Ar1Params::new(0.0, 1.5, phi + h).unwrap(), 6).unwrap();
            let minus = ar1_precision(&Ar1Params::new(0.0, 1.5, phi - h).unwrap(), 6).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    let fd = (plus.get(i, j) - minus.get(i, j)) / (2.0 * h);
                    assert_abs_diff_eq!(d.get(i, j), fd, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn samplers_are_deterministic() {
        let p = Ar1Params::new(0.3, 1.2, 0.6).unwrap();
        assert_eq!(sample_ar1(&p, 7, 11, 99).unwrap(), sample_ar1(&p, 7, 11, 99).unwrap());
        assert_ne!(sample_ar1(&p, 7, 11, 99).unwrap(), sample_ar1(&p, 7, 11, 100).unwrap());
        let q = Ma1Params::new(-0.1, 0.8, -0.4).unwrap();
        assert_eq!(sample_ma1(&q, 5, 9, 7).unwrap(), sample_ma1(&q, 5, 9, 7).unwrap());
    }

    fn lag_autocov(y: &SeriesMatrix, lag: usize) -> f64 {
        let mut s = 0.0;
        let mut n = 0usize;
        for r in y.rows() {
            for t in lag..r.len() {
                s += r[t] * r[t - lag];
                n += 1;
            }
        }
        s / n as f64
    }

    #[test]
    fn white_noise_moments() {
        let y = sample_ar1(&Ar1Params::new(0.0, 1.0, 0.0).unwrap(), 100, 100, 1).unwrap();
        let var = y.as_slice().iter().map(|v| v * v).sum::<f64>() / 1e4;
        assert_abs_diff_eq!(var, 1.0, epsilon = 0.02);
        let y = sample_ma1(&Ma1Params::new(0.0, 1.0, 0.0).unwrap(), 100, 100, 2).unwrap();
        assert_abs_diff_eq!(lag_autocov(&y, 1), 0.0, epsilon = 0.02);
    }

    #[test]
    fn ar1_lag_one_autocovariance() {
        let y = sample_ar1(&Ar1Params::new(0.0, 1.0, 0.5).unwrap(), 2000, 50, 3).unwrap();
        assert_abs_diff_eq!(lag_autocov(&y, 1), 2.0 / 3.0, epsilon = 0.05);
    }

    #[test]
    fn ma1_lag_autocovariances() {
        let y = sample_ma1(&Ma1Params::new(0.0, 1.0, 0.5).unwrap(), 2000, 50, 4).unwrap();
        assert_abs_diff_eq!(lag_autocov(&y, 1), 0.5, epsilon = 0.05);
        assert_abs_diff_eq!(lag_autocov(&y, 2), 0.0, epsilon = 0.05);
    }

    #[test]
    fn sample_covariance_within_five_standard_errors() {
        let nu = 5000;
        let t = 10;
        let model_ar = LinearModel::standard(ModelKind::Ar1);
        let model_ma = LinearModel::standard(ModelKind::Ma1);
        for (model, theta, seed) in [(model_ar, 0.6, 11), (model_ma, -0.7, 12)] {
            let y = model.sample(theta, nu, t, seed).unwrap();
            let s = sum_of_squares(&y);
            let cov = model.covariance(theta, t).unwrap();
            for i in 0..t {
                for j in 0..t {
                    let est = s.get(i, j) / nu as f64;
                    let se = ((cov.get(i, i) * cov.get(j, j) + cov.get(i, j).powi(2)) / nu as f64).sqrt();
                    assert!(
                        (est - cov.get(i, j)).abs() <= 5.0 * se,
                        "{:?} entry ({i},{j}): {est} vs {}",
                        model.kind,
                        cov.get(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn sum_of_squares_examples() {
        let y = SeriesMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(sum_of_squares(&y).to_rows(), vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        let y = SeriesMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(sum_of_squares(&y), SymMatrix::identity(2));
    }

    #[test]
    fn sum_of_squares_matches_triple_loop() {
        let y = sample_ma1(&Ma1Params::new(0.5, 2.0, 0.3).unwrap(), 37, 8, 5).unwrap();
        let s = sum_of_squares(&y);
        for i in 0..8 {
            for j in 0..8 {
                let mut acc = 0.0;
                for r in 0..37 {
                    acc += y.row(r)[i] * y.row(r)[j];
                }
                assert_abs_diff_eq!(s.get(i, j), acc, epsilon = 1e-12);
            }
        }
        assert!(s.is_exactly_symmetric());
    }

    #[test]
    fn ma1_precision_derivative_is_accurate() {
        let model = LinearModel::standard(ModelKind::Ma1);
        let d = model.precision_derivative(0.4, 5).unwrap();
        let h = 1e-4;
        let plus = model.precision(0.4 + h, 5).unwrap();
        let minus = model.precision(0.4 - h, 5).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_abs_diff_eq!(d.get(i, j), (plus.get(i, j) - minus.get(i, j)) / (2.0 * h), epsilon = 1e-6);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn product_is_identity(cov: &SymMatrix, prec: &SymMatrix) -> f64 {
            let n = cov.dim();
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let v: f64 = (0..n).map(|k| prec.get(i, k) * cov.get(k, j)).sum();
                    worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
            worst
        }

        proptest! {
            #[test]
            fn precision_times_covariance_is_identity(
                coef in -0.95f64..0.95, sigma2 in 0.2f64..3.0, mu in -2.0f64..2.0, t in 2usize..=20
            ) {
                let ar = Ar1Params::new(mu, sigma2, coef).unwrap();
                prop_assert!(product_is_identity(&ar1_covariance(&ar, t).unwrap(), &ar1_precision(&ar, t).unwrap()) < 1e-10);
                let ma = Ma1Params::new(mu, sigma2, coef).unwrap();
                prop_assert!(product_is_identity(&ma1_covariance(&ma, t).unwrap(), &ma1_precision(&ma, t).unwrap()) < 1e-10);
            }

            #[test]
            fn sum_of_squares_is_symmetric(data in prop::collection::vec(-10.0f64..10.0, 24)) {
                let y = SeriesMatrix::new(4, 6, data).unwrap();
                prop_assert!(sum_of_squares(&y).is_exactly_symmetric());
            }
        }
    }
}
