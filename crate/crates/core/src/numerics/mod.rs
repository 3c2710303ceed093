//! Special functions, optimizers and small dense linear algebra.

mod lambert;
pub mod linalg;
pub mod optimize;
mod special;

pub use lambert::lambert_w_minus1;
pub use optimize::{
    expand_bracket, minimize_1d, nelder_mead, Bracket, Budget, OptimizerReport, StopReason,
};
pub use special::{log_beta, log_choose, log_factorial, log_gamma, log_sum_exp};

pub(crate) use special::{log_beta_unchecked, log_gamma_unchecked, neg_p_minus_log1m};
