mod common;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;

use common::{dense, mean_and_se, mvn_logpdf, wobble};
use minscore::inference::{minimize_scalar, num_grad};
use minscore::models::{ar1_covariance, ar1_precision, ma1_covariance, ma1_precision, Ar1Params, Ma1Params};
use minscore::scoring::{
    ar1_full_loglik, ar1_hyvarinen, ar1_pairwise_closed_form, ar1_pairwise_loglik, gaussian_hyvarinen,
    ma1_full_loglik, ma1_hyvarinen, ma1_pairwise_loglik, per_series_objectives, total_score,
};
use minscore::{EstimatorKind, LinearModel, ModelKind, SymMatrix};

/// `laplacian + 1/2 |grad|^2` of `log_q` by central differences.
fn fd_hyvarinen(log_q: impl Fn(&[f64]) -> f64, y: &[f64]) -> f64 {
    let h = 1e-4;
    let f0 = log_q(y);
    let mut lap = 0.0;
    let mut grad_sq = 0.0;
    for i in 0..y.len() {
        let mut up = y.to_vec();
        let mut dn = y.to_vec();
        up[i] += h;
        dn[i] -= h;
        let (fu, fd) = (log_q(&up), log_q(&dn));
        lap += (fu - 2.0 * f0 + fd) / (h * h);
        grad_sq += ((fu - fd) / (2.0 * h)).powi(2);
    }
    lap + 0.5 * grad_sq
}

fn quad_log_density(prec: DMatrix<f64>, mu: f64, log_norm: f64) -> impl Fn(&[f64]) -> f64 {
    move |y: &[f64]| {
        let r = nalgebra::DVector::from_iterator(y.len(), y.iter().map(|v| v - mu));
        -0.5 * r.dot(&(&prec * &r)) + log_norm
    }
}

#[test]
fn gaussian_hyvarinen_matches_finite_differences() {
    let w = wobble(16, 3);
    let a = DMatrix::from_row_slice(4, 4, &w);
    let p = &a * a.transpose() + DMatrix::identity(4, 4) * 2.0;
    let prec = SymMatrix::from_rows(
        &(0..4)
            .map(|i| (0..4).map(|j| p[(i, j)]).collect())
            .collect::<Vec<Vec<f64>>>(),
    )
    .unwrap();
    let y = [0.4, -1.1, 0.7, 0.2];
    let mu = 0.3;
    let closed = gaussian_hyvarinen(&y, &prec, mu).unwrap();
    // the score never sees the normalizer
    for log_norm in [0.0, 17.5] {
        let fd = fd_hyvarinen(quad_log_density(p.clone(), mu, log_norm), &y);
        assert_abs_diff_eq!(closed, fd, epsilon = 1e-5);
    }
}

#[test]
fn ma1_hyvarinen_matches_finite_differences() {
    let p = Ma1Params::new(0.1, 1.3, 0.6).unwrap();
    let cov = dense(&ma1_covariance(&p, 4).unwrap());
    let prec = cov.try_inverse().unwrap();
    let y = [0.5, -0.2, 1.4, -0.9];
    let fd = fd_hyvarinen(quad_log_density(prec, p.mu, 0.0), &y);
    assert_abs_diff_eq!(ma1_hyvarinen(&y, &p).unwrap(), fd, epsilon = 1e-5);
}

#[test]
fn gaussian_equivalence_on_a_grid() {
    for t in 3..=20 {
        for (k, th) in [-0.95, -0.6, -0.2, 0.0, 0.3, 0.7, 0.95].into_iter().enumerate() {
            let y = wobble(t, k as u64 + 10 * t as u64);
            let ar = Ar1Params::new(0.25, 0.8, th).unwrap();
            let ma = Ma1Params::new(-0.3, 1.7, th).unwrap();
            let g_ar = gaussian_hyvarinen(&y, &ar1_precision(&ar, t).unwrap(), ar.mu).unwrap();
            let g_ma = gaussian_hyvarinen(&y, &ma1_precision(&ma, t).unwrap(), ma.mu).unwrap();
            assert_abs_diff_eq!(ar1_hyvarinen(&y, &ar).unwrap(), g_ar, epsilon = 1e-8);
            assert_abs_diff_eq!(ma1_hyvarinen(&y, &ma).unwrap(), g_ma, epsilon = 1e-8);
        }
    }
}

#[test]
fn full_logliks_match_dense_normal_density() {
    let y = [0.3, -1.2, 0.8, 0.1, -0.5];
    let ma = Ma1Params::new(0.0, 1.0, 0.3).unwrap();
    let dense_ma = mvn_logpdf(&y, ma.mu, &dense(&ma1_covariance(&ma, 5).unwrap()));
    assert_abs_diff_eq!(ma1_full_loglik(&y, &ma).unwrap(), dense_ma, epsilon = 1e-10);

    let ma = Ma1Params::new(0.4, 2.5, -0.7).unwrap();
    let dense_ma = mvn_logpdf(&y, ma.mu, &dense(&ma1_covariance(&ma, 5).unwrap()));
    assert_abs_diff_eq!(ma1_full_loglik(&y, &ma).unwrap(), dense_ma, epsilon = 1e-10);

    let ar = Ar1Params::new(-0.2, 1.6, 0.55).unwrap();
    let dense_ar = mvn_logpdf(&y, ar.mu, &dense(&ar1_covariance(&ar, 5).unwrap()));
    assert_abs_diff_eq!(ar1_full_loglik(&y, &ar).unwrap(), dense_ar, epsilon = 1e-10);
}

#[test]
fn pairwise_logliks_match_bivariate_densities() {
    let y = wobble(9, 77);
    let ma = Ma1Params::new(0.2, 1.4, 0.4).unwrap();
    let ar = Ar1Params::new(0.2, 1.4, -0.65).unwrap();
    let pair_cov_ma = dense(&ma1_covariance(&ma, 2).unwrap());
    let pair_cov_ar = dense(&ar1_covariance(&ar, 2).unwrap());
    let (mut sum_ma, mut sum_ar) = (0.0, 0.0);
    for w in y.windows(2) {
        sum_ma += mvn_logpdf(w, ma.mu, &pair_cov_ma);
        sum_ar += mvn_logpdf(w, ar.mu, &pair_cov_ar);
    }
    assert_abs_diff_eq!(ma1_pairwise_loglik(&y, &ma).unwrap(), sum_ma, epsilon = 1e-10);
    assert_abs_diff_eq!(ar1_pairwise_loglik(&y, &ar).unwrap(), sum_ar, epsilon = 1e-10);
}

#[test]
fn ar1_hyvarinen_gradient_matches_hand_derivative() {
    let y = [0.7, -0.4, 1.2, 0.3, -0.8, 0.5];
    let (phi, s2) = (0.3, 1.5);
    let t = y.len();
    let c = 1.0 + phi * phi;
    let mut num = 0.0;
    for k in 1..t - 1 {
        let (a, b) = (y[k], y[k - 1] + y[k + 1]);
        num += 2.0 * (c * a - phi * b) * (2.0 * phi * a - b);
    }
    num += -2.0 * (y[0] - phi * y[1]) * y[1];
    num += -2.0 * (y[t - 1] - phi * y[t - 2]) * y[t - 2];
    let analytic = num / (2.0 * s2 * s2) - (t - 2) as f64 * 2.0 * phi / s2;
    let f = |p: f64| ar1_hyvarinen(&y, &Ar1Params::new(0.0, s2, p).unwrap()).unwrap();
    assert_abs_diff_eq!(num_grad(f, phi, None).unwrap(), analytic, epsilon = 1e-5);
}

#[test]
fn total_score_matches_row_loop() {
    for kind in [ModelKind::Ar1, ModelKind::Ma1] {
        let model = LinearModel::new(kind, 0.1, 1.2);
        let y = model.sample(0.4, 7, 9, 5).unwrap();
        for est in [EstimatorKind::FullMl, EstimatorKind::PairwiseMl, EstimatorKind::HyvarinenUnivariate] {
            let mut brute = 0.0;
            for row in y.rows() {
                brute += match (kind, est) {
                    (ModelKind::Ar1, EstimatorKind::FullMl) => -ar1_full_loglik(row, &model.ar1_params(0.4).unwrap()).unwrap(),
                    (ModelKind::Ar1, EstimatorKind::PairwiseMl) => {
                        -ar1_pairwise_loglik(row, &model.ar1_params(0.4).unwrap()).unwrap()
                    }
                    (ModelKind::Ar1, _) => ar1_hyvarinen(row, &model.ar1_params(0.4).unwrap()).unwrap(),
                    (ModelKind::Ma1, EstimatorKind::FullMl) => -ma1_full_loglik(row, &model.ma1_params(0.4).unwrap()).unwrap(),
                    (ModelKind::Ma1, EstimatorKind::PairwiseMl) => {
                        -ma1_pairwise_loglik(row, &model.ma1_params(0.4).unwrap()).unwrap()
                    }
                    (ModelKind::Ma1, _) => ma1_hyvarinen(row, &model.ma1_params(0.4).unwrap()).unwrap(),
                };
            }
            let total = total_score(&y, est, &model, 0.4).unwrap();
            assert_abs_diff_eq!(total, brute, epsilon = 1e-12 * brute.abs().max(1.0));
        }
    }
}

/// Dense-grid minimizer of the mean Hyvärinen score.
fn grid_argmin(f: impl Fn(f64) -> f64) -> f64 {
    (-990..=990)
        .map(|k| k as f64 / 1000.0)
        .map(|th| (th, f(th)))
        .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
        .0
}

#[test]
fn hyvarinen_score_is_proper() {
    for kind in [ModelKind::Ar1, ModelKind::Ma1] {
        let model = LinearModel::standard(kind);
        for theta0 in [-0.5, 0.5] {
            let y = model.sample(theta0, 5000, 10, 31).unwrap();
            let best = grid_argmin(|th| total_score(&y, EstimatorKind::HyvarinenUnivariate, &model, th).unwrap());
            assert!((best - theta0).abs() <= 0.02, "{kind} {theta0}: {best}");
        }
    }
}

#[test]
fn per_series_score_equations_are_unbiased() {
    let h = 1e-5;
    let mut seed = 100;
    for kind in [ModelKind::Ar1, ModelKind::Ma1] {
        let model = LinearModel::standard(kind);
        for est in [EstimatorKind::FullMl, EstimatorKind::PairwiseMl, EstimatorKind::HyvarinenUnivariate] {
            for theta0 in [-0.5, 0.0, 0.5] {
                seed += 1;
                let y = model.sample(theta0, 2000, 20, seed).unwrap();
                let up = per_series_objectives(&y, est, &model, theta0 + h).unwrap();
                let dn = per_series_objectives(&y, est, &model, theta0 - h).unwrap();
                let grads: Vec<f64> = up.iter().zip(&dn).map(|(a, b)| (a - b) / (2.0 * h)).collect();
                let (m, se) = mean_and_se(&grads);
                assert!(m.abs() <= 5.0 * se, "{kind} {est} {theta0}: mean {m}, se {se}");
            }
        }
    }
}

#[test]
fn closed_form_pairwise_is_the_joint_maximizer() {
    let model = LinearModel::standard(ModelKind::Ar1);
    let y = model.sample(0.5, 200, 50, 8).unwrap();
    let cf = ar1_pairwise_closed_form(&y).unwrap();
    assert!(!cf.boundary);

    let neg_pl = |phi: f64, s2: f64| -> f64 {
        let p = Ar1Params::new(0.0, s2, phi).unwrap();
        -y.rows().map(|r| ar1_pairwise_loglik(r, &p).unwrap()).sum::<f64>()
    };
    let best_log_s2 = |phi: f64| minimize_scalar(|ls: f64| neg_pl(phi, ls.exp()), -3.0, 3.0, 1e-10).unwrap();
    let profile = |phi: f64| neg_pl(phi, best_log_s2(phi).exp());
    let phi_num = minimize_scalar(profile, -0.99, 0.99, 1e-10).unwrap();
    let s2_num = best_log_s2(phi_num).exp();
    assert_abs_diff_eq!(cf.phi, phi_num, epsilon = 1e-4);
    assert_abs_diff_eq!(cf.sigma2, s2_num, epsilon = 1e-4);
}

#[test]
fn closed_form_pairwise_is_consistent() {
    let model = LinearModel::standard(ModelKind::Ar1);
    let y = model.sample(0.5, 2000, 50, 123).unwrap();
    let cf = ar1_pairwise_closed_form(&y).unwrap();
    assert_abs_diff_eq!(cf.phi, 0.5, epsilon = 0.01);
    assert_abs_diff_eq!(cf.sigma2, 1.0, epsilon = 0.02);
}
