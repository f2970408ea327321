//! Minimum-score fitting and sandwich (Godambe) standard errors shared by all
//! four estimators.

pub mod fit;
pub mod godambe;
pub mod numdiff;
pub mod optimize;

pub use fit::{fit, EstimateRecord, FitOptions};
pub use godambe::{
    are, fisher_information, godambe_empirical, godambe_montecarlo, GodambeComponents, InformationMethod,
    McDesign, SensitivitySource,
};
pub use numdiff::{num_grad, num_hess};
pub use optimize::minimize_scalar;
