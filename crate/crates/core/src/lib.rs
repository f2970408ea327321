//! Minimum-score estimation for stationary Gaussian AR(1) and MA(1) series.
//!
//! Four estimators of the scalar dependence parameter are provided, each as
//! the minimizer of a total empirical score over `nu` independent series:
//!
//! * full maximum likelihood,
//! * consecutive pairwise likelihood,
//! * the summed univariate Hyvärinen score,
//! * the Hyvärinen score of the Wishart law of `S = Y^T Y`.
//!
//! Standard errors come from the Godambe (sandwich) information, estimated
//! empirically or by simulation. The [`sim`] module drives replicated
//! experiments and writes efficiency tables.

pub mod error;
pub mod inference;
pub mod matrix;
pub mod models;
pub mod rng;
pub mod scoring;
pub mod sim;
pub mod wishart;

pub use error::{Error, Result};
pub use inference::{fit, EstimateRecord, FitOptions};
pub use matrix::SymMatrix;
pub use models::{LinearModel, ModelKind, SeriesMatrix};
pub use scoring::EstimatorKind;
