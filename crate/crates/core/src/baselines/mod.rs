//! Competing estimators: maximum likelihood, the DNM moment estimator, and
//! score matching and minimum distance for the Yule–Simon family.

mod mle;
mod yule_simon;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::Sample;
use crate::models::{Family, Setting};
use crate::numerics::Budget;
use crate::stein::{check_sample, EstimateResult, NeReason};

pub use mle::{log_likelihood, mle};
pub use yule_simon::{
    minimum_distance_objective, minimum_distance_objective_explicit, minimum_distance_ys, score_matching_objective, score_matching_ys, MdReading,
};

/// Which competing estimator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Mle,
    Moment,
    ScoreMatching,
    MinimumDistance,
}

/// Optimizer budget, starting point and estimator variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineOptions {
    pub budget: Budget,
    /// Overrides the family's default starting point.
    pub start: Option<Vec<f64>>,
    pub md_reading: MdReading,
    /// Bracket searches on `ln ρ` give up beyond this magnitude.
    pub log_limit: f64,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        Self {
            budget: Budget::default(),
            start: None,
            md_reading: MdReading::default(),
            log_limit: 25.0,
        }
    }
}

/// A baseline estimator with its options.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineMethod {
    pub kind: BaselineKind,
    pub options: BaselineOptions,
}

impl BaselineMethod {
    pub fn new(kind: BaselineKind) -> Self {
        Self {
            kind,
            options: BaselineOptions::default(),
        }
    }

    pub fn estimate(&self, setting: &Setting, sample: &Sample) -> Result<EstimateResult> {
        match self.kind {
            BaselineKind::Mle => mle(setting, sample, &self.options),
            BaselineKind::Moment => moment_dnm(setting, sample),
            BaselineKind::ScoreMatching => score_matching_ys(setting, sample, &self.options),
            BaselineKind::MinimumDistance => minimum_distance_ys(setting, sample, &self.options),
        }
    }
}

/// Default optimizer starting point for a family's MLE.
pub fn default_start(setting: &Setting) -> Vec<f64> {
    let d = setting.dim();
    match setting.family() {
        Family::Poisson | Family::TruncPoisson | Family::YuleSimon => vec![1.0],
        Family::Binomial | Family::TruncBinomial | Family::Logarithmic => vec![0.5],
        Family::BetaNegBinomial => vec![1.0, 1.0],
        Family::NegMultinomial | Family::TruncNegMultinomial => vec![1.0 / (d as f64 + 1.0); d],
        Family::DirichletNegMultinomial => vec![1.0; d],
    }
}

/// DNM moment estimator `α̂ = (α0 − 1) X̄ / r`, defined for `α0 > 1`.
pub fn moment_dnm(setting: &Setting, sample: &Sample) -> Result<EstimateResult> {
    if setting.family() != Family::DirichletNegMultinomial {
        return Err(crate::Error::Usage(format!(
            "the moment estimator is defined for `dnm`, not `{}`",
            setting.family()
        )));
    }
    check_sample(setting, sample)?;
    let (r, a0) = (setting.r(), setting.alpha0());
    if a0 <= 1.0 {
        return Ok(EstimateResult::not_eligible(NeReason::OutOfDomain));
    }
    let alpha = sample.column_means().iter().map(|m| (a0 - 1.0) * m / r).collect();
    Ok(EstimateResult::checked(setting, alpha))
}
