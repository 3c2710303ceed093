use std::time::Instant;

use crate::error::{Error, Result};
use crate::lattice::Sample;
use crate::models::{Family, ModelSpec, PmfEval, Setting};
use crate::numerics::optimize::{nelder_mead_with, Bracket, SimplexTolerances, StopReason};
use crate::numerics::{expand_bracket, lambert_w_minus1, minimize_1d};
use crate::stein::{check_sample, EstimateResult, NeReason};

use super::{default_start, BaselineOptions};

/// Log-likelihood of `theta` on `sample` under the normalized pmf.
pub fn log_likelihood(setting: &Setting, sample: &Sample, theta: &[f64]) -> Result<f64> {
    check_sample(setting, sample)?;
    let model = ModelSpec::new(setting.clone(), theta.to_vec())?;
    let eval = PmfEval::new(&model)?;
    Ok(sample.rows().map(|k| eval.log_pmf_unchecked(k)).sum())
}

/// Distinct rows with their multiplicities.
fn compress(sample: &Sample) -> Vec<(Vec<i64>, f64)> {
    let mut rows: Vec<&[i64]> = sample.rows().collect();
    rows.sort_unstable();
    let mut out: Vec<(Vec<i64>, f64)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some((last, c)) if last.as_slice() == r => *c += 1.0,
            _ => out.push((r.to_vec(), 1.0)),
        }
    }
    out
}

/// Mean negative log-likelihood, `+inf` where `theta` is invalid.
fn mean_nll(setting: &Setting, groups: &[(Vec<i64>, f64)], n: f64, theta: Vec<f64>) -> f64 {
    let Ok(model) = ModelSpec::new(setting.clone(), theta) else {
        return f64::INFINITY;
    };
    let Ok(eval) = PmfEval::new(&model) else {
        return f64::INFINITY;
    };
    let ll: f64 = groups.iter().map(|(k, c)| c * eval.log_pmf_unchecked(k)).sum();
    let v = -ll / n;
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Maximum likelihood estimate of the free parameters of `setting`.
///
/// Poisson, binomial, negative multinomial and logarithmic use closed forms;
/// the other univariate families use Brent's method on a transformed
/// parameter and the multivariate ones Nelder–Mead.
pub fn mle(setting: &Setting, sample: &Sample, options: &BaselineOptions) -> Result<EstimateResult> {
    check_sample(setting, sample)?;
    let clock = Instant::now();
    let means = sample.column_means();
    let boundary = || Ok(EstimateResult::not_eligible(NeReason::OutOfDomain));
    let result = match setting.family() {
        Family::Poisson => {
            if means[0] <= 0.0 {
                return boundary();
            }
            EstimateResult::checked(setting, vec![means[0]])
        }
        Family::Binomial => {
            let p = means[0] / setting.m() as f64;
            if p <= 0.0 || p >= 1.0 {
                return boundary();
            }
            EstimateResult::checked(setting, vec![p])
        }
        Family::NegMultinomial => {
            if means.iter().any(|&m| m <= 0.0) {
                return boundary();
            }
            let den = setting.r() + means.iter().sum::<f64>();
            EstimateResult::checked(setting, means.iter().map(|m| m / den).collect())
        }
        Family::Logarithmic => logarithmic_mle(means[0]),
        Family::YuleSimon | Family::TruncPoisson | Family::TruncBinomial => one_dimensional(setting, sample, options)?,
        Family::BetaNegBinomial | Family::TruncNegMultinomial | Family::DirichletNegMultinomial => {
            simplex_search(setting, sample, options)?
        }
    };
    if clock.elapsed().as_secs_f64() > options.budget.max_seconds {
        return Ok(EstimateResult::not_eligible(NeReason::RuntimeExceeded));
    }
    Ok(result)
}

/// `p̂ = 1 − exp(W₋₁(−1/(X̄ e^{1/X̄})) + 1/X̄)`.
fn logarithmic_mle(mean: f64) -> EstimateResult {
    if mean <= 1.0 {
        // every observation equals 1: the likelihood increases as p → 0
        return EstimateResult::not_eligible(NeReason::OutOfDomain);
    }
    let inv = 1.0 / mean;
    let Ok(w) = lambert_w_minus1(-inv * (-inv).exp()) else {
        return EstimateResult::not_eligible(NeReason::SingularSystem);
    };
    // 1 − exp(w + 1/X̄) loses digits when the exponent is near 0
    let p = -(w + inv).exp_m1();
    if p <= 0.0 {
        return EstimateResult::not_eligible(NeReason::OutOfDomain);
    }
    EstimateResult::checked(&Setting::logarithmic(), vec![p])
}

/// Parameter transforms between the real line and the family's range.
fn to_free(family: Family, theta: f64) -> f64 {
    match family {
        Family::TruncBinomial => (theta / (1.0 - theta)).ln(),
        _ => theta.ln(),
    }
}

fn from_free(family: Family, u: f64) -> f64 {
    match family {
        Family::TruncBinomial => 1.0 / (1.0 + (-u).exp()),
        _ => u.exp(),
    }
}

/// True when every observation sits where the likelihood keeps increasing
/// toward the edge of the parameter range: all ones for Yule–Simon, all at
/// one end of the box for the truncated families.
fn degenerate_1d(setting: &Setting, sample: &Sample) -> bool {
    let first = sample.row(0)[0];
    if sample.column(0).any(|v| v != first) {
        return false;
    }
    let support = setting.support();
    match setting.family() {
        Family::YuleSimon => first == 1,
        _ => support.lower_finite(0) == Some(first) || support.upper_finite(0) == Some(first),
    }
}

fn one_dimensional(setting: &Setting, sample: &Sample, options: &BaselineOptions) -> Result<EstimateResult> {
    let family = setting.family();
    if degenerate_1d(setting, sample) {
        return Ok(EstimateResult::not_eligible(NeReason::OutOfDomain));
    }
    let groups = compress(sample);
    let n = sample.len() as f64;
    let start = options.start.clone().unwrap_or_else(|| default_start(setting));
    let objective = |u: f64| mean_nll(setting, &groups, n, vec![from_free(family, u)]);
    let (lo, hi) = match expand_bracket(objective, to_free(family, start[0]), options.log_limit) {
        Ok(Bracket::Found(lo, hi)) => (lo, hi),
        Ok(Bracket::HitLimit(_)) => return Ok(EstimateResult::not_eligible(NeReason::OutOfDomain)),
        Err(_) => return Ok(EstimateResult::not_eligible(NeReason::OptimizerFailure)),
    };
    Ok(match minimize_1d(objective, (lo, hi), 1e-10) {
        Ok(u) => EstimateResult::checked(setting, vec![from_free(family, u)]),
        Err(_) => EstimateResult::not_eligible(NeReason::OptimizerFailure),
    })
}

fn simplex_search(setting: &Setting, sample: &Sample, options: &BaselineOptions) -> Result<EstimateResult> {
    let groups = compress(sample);
    let n = sample.len() as f64;
    let start = options.start.clone().unwrap_or_else(|| default_start(setting));
    if start.len() != setting.theta_dim() {
        return Err(Error::Usage(format!(
            "starting point has {} entries, `{}` has {} parameters",
            start.len(),
            setting.family(),
            setting.theta_dim()
        )));
    }
    let simplex_family = setting.family() == Family::TruncNegMultinomial;
    // Log coordinates for positive parameters; for simplex-constrained
    // probabilities, p_i = e^{z_i} / (1 + Σ e^{z_j}).
    let decode = |z: &[f64]| -> Vec<f64> {
        if simplex_family {
            let m = z.iter().copied().fold(0.0f64, f64::max);
            let den = (-m).exp() + z.iter().map(|v| (v - m).exp()).sum::<f64>();
            z.iter().map(|v| (v - m).exp() / den).collect()
        } else {
            z.iter().map(|v| v.exp()).collect()
        }
    };
    let z0: Vec<f64> = if simplex_family {
        let p0 = 1.0 - start.iter().sum::<f64>();
        if p0 <= 0.0 || start.iter().any(|&p| p <= 0.0) {
            return Err(Error::Usage("starting point is outside the probability simplex".into()));
        }
        start.iter().map(|p| (p / p0).ln()).collect()
    } else {
        if start.iter().any(|&v| v <= 0.0) {
            return Err(Error::Usage("starting point must be positive".into()));
        }
        start.iter().map(|v| v.ln()).collect()
    };
    let tol = SimplexTolerances {
        initial_step: Some(0.1),
        ..SimplexTolerances::default()
    };
    let mut objective = |z: &[f64]| mean_nll(setting, &groups, n, decode(z));
    let report = match nelder_mead_with(&mut objective, &z0, options.budget, tol) {
        Ok(r) => r,
        Err(_) => return Ok(EstimateResult::not_eligible(NeReason::OptimizerFailure)),
    };
    Ok(match report.stop {
        StopReason::Converged => EstimateResult::checked(setting, decode(&report.argmin)),
        StopReason::TimeExceeded => EstimateResult::not_eligible(NeReason::RuntimeExceeded),
        StopReason::IterationCap => EstimateResult::not_eligible(NeReason::OptimizerFailure),
    })
}
