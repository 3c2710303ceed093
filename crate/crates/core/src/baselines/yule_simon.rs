use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Sample;
use crate::models::{Family, Setting};
use crate::numerics::optimize::Bracket;
use crate::numerics::{expand_bracket, minimize_1d};
use crate::stein::{check_sample, EstimateResult, NeReason};

use super::BaselineOptions;

/// Reading of the minimum-distance objective
/// `Σ_k ( (1/n) Σ_i 1{X_i=k} + (X_i/(X_i+1+ρ) − 1) 1{X_i ⋄ k} )²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MdReading {
    /// `⋄` is `≥`, square outside the average over `i`. The population value
    /// of each summand is zero at the true `ρ`, so the estimator is consistent.
    #[default]
    InclusiveTail,
    /// `⋄` is `>`, square outside the average, character for character.
    AsPrinted,
    /// `⋄` is `>`, square inside the average over `i`.
    SquareInside,
}

fn iota(u: f64) -> f64 {
    1.0 / (1.0 + u)
}

// Summing in sorted order makes the objectives exactly invariant to the
// order of the observations.
fn sorted_values(sample: &Sample) -> Vec<i64> {
    let mut v: Vec<i64> = sample.column(0).collect();
    v.sort_unstable();
    v
}

fn require_ys(setting: &Setting, sample: &Sample) -> Result<()> {
    if setting.family() != Family::YuleSimon {
        return Err(Error::Usage(format!(
            "this estimator is defined for `yulesimon`, not `{}`",
            setting.family()
        )));
    }
    check_sample(setting, sample)
}

/// Score-matching objective at `ρ`:
/// mean of `ι(X/(X+1+ρ))² + ι((X−1)/(X+ρ))² − 2 ι(X/(X+1+ρ))`.
pub fn score_matching_objective(sample: &Sample, rho: f64) -> f64 {
    let total: f64 = sorted_values(sample)
        .into_iter()
        .map(|k| {
            let x = k as f64;
            let up = iota(x / (x + 1.0 + rho));
            let down = iota((x - 1.0) / (x + rho));
            up * up + down * down - 2.0 * up
        })
        .sum();
    total / sample.len() as f64
}

/// Minimum-distance objective at `ρ`, summed over `k = 1..=max(sample)`.
/// Summands beyond the sample maximum vanish, so the sum is exact. Runs of
/// `k` between distinct observations share one summand and are added in a
/// single step.
pub fn minimum_distance_objective(sample: &Sample, rho: f64, reading: MdReading) -> f64 {
    let n = sample.len() as f64;
    let ratio = |x: f64| x / (x + 1.0 + rho) - 1.0;
    if reading == MdReading::SquareInside {
        // Σ_i [1 + (X_i − 1) r(X_i)²] / n
        return sorted_values(sample)
            .into_iter()
            .map(|k| {
                let r = ratio(k as f64);
                1.0 + (k - 1) as f64 * r * r
            })
            .sum::<f64>()
            / n;
    }
    let values = sorted_values(sample);
    // (value, count, Σ r over the copies), in increasing order
    let mut groups: Vec<(i64, f64, f64)> = Vec::new();
    for v in values {
        let r = ratio(v as f64);
        match groups.last_mut() {
            Some((last, c, s)) if *last == v => {
                *c += 1.0;
                *s += r;
            }
            _ => groups.push((v, 1.0, r)),
        }
    }
    let mut above: f64 = groups.iter().map(|g| g.2).sum();
    let mut total = 0.0;
    let mut prev = 0i64;
    for &(v, count, r_sum) in &groups {
        // k strictly between the previous observed value and v: no X_i = k,
        // and every X_i >= v lies above k.
        let gap = (v - prev - 1) as f64;
        total += gap * (above / n).powi(2);
        let d = match reading {
            MdReading::InclusiveTail => (count + above) / n,
            _ => (count + above - r_sum) / n,
        };
        total += d * d;
        above -= r_sum;
        prev = v;
    }
    total
}

/// The minimum-distance objective summed term by term over `k = 1..=k_max`.
pub fn minimum_distance_objective_explicit(sample: &Sample, rho: f64, reading: MdReading, k_max: i64) -> f64 {
    let n = sample.len() as f64;
    let ratio = |x: f64| x / (x + 1.0 + rho) - 1.0;
    (1..=k_max)
        .map(|k| {
            let term = |x: i64| -> f64 {
                let hit = if x == k { 1.0 } else { 0.0 };
                let tail = match reading {
                    MdReading::InclusiveTail => x >= k,
                    _ => x > k,
                };
                hit + if tail { ratio(x as f64) } else { 0.0 }
            };
            match reading {
                MdReading::SquareInside => sample.column(0).map(|x| term(x).powi(2)).sum::<f64>() / n,
                _ => (sample.column(0).map(term).sum::<f64>() / n).powi(2),
            }
        })
        .sum()
}

/// Minimizes `objective(ρ)` over `ρ > 0` in `ln ρ`, from the configured start.
fn minimize_rho(objective: impl Fn(f64) -> f64, options: &BaselineOptions) -> EstimateResult {
    let clock = Instant::now();
    let start = options.start.as_ref().map_or(1.0, |s| s[0]);
    if !(start > 0.0) {
        return EstimateResult::not_eligible(NeReason::OptimizerFailure);
    }
    let in_log = |u: f64| objective(u.exp());
    let (lo, hi) = match expand_bracket(in_log, start.ln(), options.log_limit) {
        Ok(Bracket::Found(lo, hi)) => (lo, hi),
        Ok(Bracket::HitLimit(_)) => return EstimateResult::not_eligible(NeReason::OutOfDomain),
        Err(_) => return EstimateResult::not_eligible(NeReason::OptimizerFailure),
    };
    let result = match minimize_1d(in_log, (lo, hi), 1e-10) {
        Ok(u) => EstimateResult::checked(&Setting::yule_simon(), vec![u.exp()]),
        Err(_) => EstimateResult::not_eligible(NeReason::OptimizerFailure),
    };
    if clock.elapsed().as_secs_f64() > options.budget.max_seconds {
        return EstimateResult::not_eligible(NeReason::RuntimeExceeded);
    }
    result
}

/// Score-matching estimate of the Yule–Simon `ρ`.
pub fn score_matching_ys(setting: &Setting, sample: &Sample, options: &BaselineOptions) -> Result<EstimateResult> {
    require_ys(setting, sample)?;
    Ok(minimize_rho(|rho| score_matching_objective(sample, rho), options))
}

/// Minimum-distance estimate of the Yule–Simon `ρ`.
pub fn minimum_distance_ys(setting: &Setting, sample: &Sample, options: &BaselineOptions) -> Result<EstimateResult> {
    require_ys(setting, sample)?;
    let reading = options.md_reading;
    Ok(minimize_rho(|rho| minimum_distance_objective(sample, rho, reading), options))
}
