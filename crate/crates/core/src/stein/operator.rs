use crate::error::{Error, Result};
use crate::models::{exact_expectation, Family, ModelSpec};

use super::TestFunction;

/// `A_θ f(k)`, one component per lattice axis.
///
/// Each family uses its simplified closed form, so no pmf ratios are formed.
/// `f` is taken as zero outside the support.
pub fn stein_operator(model: &ModelSpec, f: &TestFunction, k: &[i64]) -> Result<Vec<f64>> {
    if !model.support().contains(k) {
        return Err(Error::Domain(format!(
            "point {k:?} is outside the support {}",
            model.support()
        )));
    }
    Ok(operator_unchecked(model, f, k))
}

pub(crate) fn operator_unchecked(model: &ModelSpec, f: &TestFunction, k: &[i64]) -> Vec<f64> {
    let support = model.support();
    let fx = |p: &[i64]| f.evaluate_on(support, p);
    let th = model.theta();
    let s = model.setting();
    if model.family().is_multivariate() {
        let total = k.iter().sum::<i64>() as f64;
        let r = s.r();
        let f_here = fx(k);
        let mut shifted = k.to_vec();
        return (0..k.len())
            .map(|i| {
                shifted[i] += 1;
                let f_up = fx(&shifted);
                shifted[i] -= 1;
                let ki = k[i] as f64;
                match model.family() {
                    Family::DirichletNegMultinomial => {
                        let c = total - 1.0 + r + s.alpha0() + th.iter().sum::<f64>();
                        (total + r) * (ki + th[i]) * f_up - ki * c * f_here
                    }
                    _ => (total + r) * th[i] * f_up - ki * f_here,
                }
            })
            .collect();
    }
    let kk = k[0];
    let x = kk as f64;
    let f0 = fx(&[kk]);
    let f1 = fx(&[kk + 1]);
    let v = match model.family() {
        Family::Poisson | Family::TruncPoisson => th[0] * f1 - x * f0,
        Family::Binomial | Family::TruncBinomial => {
            let m = s.m() as f64;
            (m - x) / (x + 1.0) * f1 - (1.0 - th[0]) / th[0] * f0
        }
        Family::YuleSimon => x * f1 - (x + th[0]) * f0,
        Family::BetaNegBinomial => {
            let (a, b, r) = (th[0], th[1], s.r());
            (r + x) * (x + b) * f1 - (r + x + a + b - 1.0) * x * f0
        }
        Family::Logarithmic => th[0] * x / (x + 1.0) * f1 - f0,
        _ => unreachable!("multivariate families handled above"),
    };
    vec![v]
}

/// `E_θ[A_θ f(X)]` by exact summation over the support.
///
/// Every component is zero for `f` in the Stein class; the returned values
/// are the numerical residuals.
pub fn check_stein_identity(model: &ModelSpec, f: &TestFunction) -> Result<Vec<f64>> {
    if !f.is_compliant(model) {
        return Err(Error::Usage(format!(
            "test function `{}` is not in the Stein class of `{}` on {}",
            f.name(),
            model.family(),
            model.support()
        )));
    }
    exact_expectation(model, |k| operator_unchecked(model, f, k))
}
