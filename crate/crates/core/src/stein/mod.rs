//! Discrete Stein operators, test functions and Stein estimators.

mod estimate;
mod linear;
mod operator;
mod test_function;
mod variance;

pub use estimate::{dnm_system, stein_estimate, EstimateResult, NeReason, ZERO_DENOMINATOR};
pub(crate) use estimate::check_sample;
pub use linear::{sandwich_covariance, solve_linear_stein_system, CovarianceMode, LinearSteinForm};
pub use operator::{check_stein_identity, stein_operator};
pub use test_function::{default_test_functions, TestFunction};
pub use variance::ml_asymptotic_variance_logarithmic;
