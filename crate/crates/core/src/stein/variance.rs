use crate::error::{Error, Result};
use crate::numerics::neg_p_minus_log1m;

/// Asymptotic variance of the logarithmic-distribution MLE,
/// `(1-p)² p ln²(1-p) / (-p - ln(1-p))`.
pub fn ml_asymptotic_variance_logarithmic(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} is outside (0, 1)")));
    }
    let l = (-p).ln_1p();
    Ok((1.0 - p).powi(2) * p * l * l / neg_p_minus_log1m(p))
}
