#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use minscore::SymMatrix;

pub fn dense(m: &SymMatrix) -> DMatrix<f64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m.get(i, j))
}

/// Multivariate normal log-density with the `2 pi` constant dropped.
pub fn mvn_logpdf(y: &[f64], mu: f64, cov: &DMatrix<f64>) -> f64 {
    let n = y.len();
    let chol = cov.clone().cholesky().expect("covariance is positive definite");
    let log_det: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let r = DVector::from_iterator(n, y.iter().map(|v| v - mu));
    let solved = chol.solve(&r);
    -0.5 * log_det - 0.5 * r.dot(&solved)
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Small deterministic pseudo-random values in roughly (-2, 2).
pub fn wobble(n: usize, salt: u64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let x = ((i as u64 + 1) * 2_654_435_761 + salt * 40_503) % 10_007;
            (x as f64 / 10_007.0 - 0.5) * 4.0
        })
        .collect()
}
