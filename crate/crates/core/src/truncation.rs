//! Estimation when the truncation box is unknown: the box is estimated by
//! the componentwise sample minimum and maximum and plugged into the
//! boundary-vanishing test function.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Bound, LatticeBox, Sample};
use crate::models::{ModelSpec, Sampler, Setting};
use crate::rng::stream_rng;
use crate::stein::{default_test_functions, stein_estimate, EstimateResult, NeReason};

/// Componentwise minimum and maximum of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainEstimate {
    /// `{min_1..max_1} x ...`; an axis may be a single point.
    pub support: LatticeBox,
    pub per_axis_min: Vec<i64>,
    pub per_axis_max: Vec<i64>,
}

impl DomainEstimate {
    pub fn is_degenerate(&self) -> bool {
        self.per_axis_min.iter().zip(&self.per_axis_max).any(|(a, b)| a == b)
    }
}

pub fn estimate_domain(sample: &Sample) -> Result<DomainEstimate> {
    if sample.is_empty() {
        return Err(Error::Usage("cannot estimate a domain from an empty sample".into()));
    }
    let d = sample.dim();
    let mut lo = sample.row(0).to_vec();
    let mut hi = lo.clone();
    for row in sample.rows() {
        for i in 0..d {
            lo[i] = lo[i].min(row[i]);
            hi[i] = hi[i].max(row[i]);
        }
    }
    let support = LatticeBox::new_allow_degenerate(
        lo.iter().copied().map(Bound::Finite).collect(),
        hi.iter().copied().map(Bound::Finite).collect(),
    )?;
    Ok(DomainEstimate {
        support,
        per_axis_min: lo,
        per_axis_max: hi,
    })
}

/// Box used by the plug-in estimator: estimated bounds, except that an open
/// upper side of `setting` stays open.
fn plugin_box(setting: &Setting, domain: &DomainEstimate) -> Result<LatticeBox> {
    let upper = (0..setting.dim())
        .map(|i| match setting.support().upper()[i] {
            Bound::PlusInfinity => Bound::PlusInfinity,
            _ => Bound::Finite(domain.per_axis_max[i]),
        })
        .collect();
    let lower = domain.per_axis_min.iter().copied().map(Bound::Finite).collect();
    LatticeBox::new_allow_degenerate(lower, upper)
}

/// `setting` moved onto the box estimated from `data` (upper side kept open
/// where `setting`'s is), or `None` when that box is a single point on some
/// axis.
pub fn estimated_setting(setting: &Setting, data: &Sample) -> Result<Option<Setting>> {
    let support = plugin_box(setting, &estimate_domain(data)?)?;
    if (0..support.dim()).any(|i| support.lower_finite(i) == support.upper_finite(i)) {
        return Ok(None);
    }
    setting.with_support(support).map(Some)
}

/// Stein estimate of a truncated family whose box is estimated from the
/// sample. `setting` supplies the family and its hyperparameters; its box
/// only decides whether the upper side is open.
pub fn plugin_stein_estimate(setting: &Setting, sample: &Sample) -> Result<EstimateResult> {
    if !setting.family().is_truncated() {
        return Err(Error::Usage(format!(
            "plug-in domain estimation needs a truncated family, not `{}`",
            setting.family()
        )));
    }
    if sample.dim() != setting.dim() {
        return Err(Error::Usage(format!(
            "sample has dimension {}, model has {}",
            sample.dim(),
            setting.dim()
        )));
    }
    let Some(estimated) = estimated_setting(setting, sample)? else {
        return Ok(EstimateResult::not_eligible(NeReason::SingularSystem));
    };
    let fs = default_test_functions(estimated.family(), estimated.support());
    stein_estimate(&estimated, sample, &fs)
}

/// Empirical covariances of `√n (θ̂ − θ*)` with the true box and with the
/// estimated box, over the repetitions where each estimate is eligible.
#[derive(Debug, Clone)]
pub struct InvarianceStudy {
    pub known: DMatrix<f64>,
    pub estimated: DMatrix<f64>,
    pub eligible_known: usize,
    pub eligible_estimated: usize,
    /// Repetitions whose estimated box equals the true box.
    pub exact_domain: usize,
}

fn scaled_covariance(points: &[Vec<f64>], truth: &[f64], n: usize) -> DMatrix<f64> {
    let q = truth.len();
    let m = points.len();
    if m < 2 {
        return DMatrix::from_element(q, q, f64::NAN);
    }
    let scale = (n as f64).sqrt();
    let dev: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(truth).map(|(a, b)| scale * (a - b)).collect())
        .collect();
    let mean: Vec<f64> = (0..q).map(|j| dev.iter().map(|d| d[j]).sum::<f64>() / m as f64).collect();
    DMatrix::from_fn(q, q, |i, j| {
        dev.iter().map(|d| (d[i] - mean[i]) * (d[j] - mean[j])).sum::<f64>() / (m - 1) as f64
    })
}

/// Runs `reps` repetitions of size `n` from `model`, estimating once with
/// the true box and once with the estimated box. Repetition `r` draws from
/// stream `r` of `seed`.
pub fn variance_invariance_study(model: &ModelSpec, n: usize, reps: usize, seed: u64) -> Result<InvarianceStudy> {
    let setting = model.setting();
    if !setting.family().is_truncated() {
        return Err(Error::Usage(format!(
            "the invariance study needs a truncated family, not `{}`",
            setting.family()
        )));
    }
    if n == 0 || reps == 0 {
        return Err(Error::Usage("sample size and repetitions must be at least 1".into()));
    }
    let sampler = Sampler::new(model)?;
    let fs = default_test_functions(setting.family(), setting.support());
    let true_box = setting.support();
    let outcomes: Vec<(EstimateResult, EstimateResult, bool)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let data = sampler.sample(n, &mut stream_rng(seed, r as u64));
            let known = stein_estimate(setting, &data, &fs)?;
            let plugin = plugin_stein_estimate(setting, &data)?;
            let domain = plugin_box(setting, &estimate_domain(&data)?)?;
            Ok((known, plugin, &domain == true_box))
        })
        .collect::<Result<_>>()?;
    let known: Vec<Vec<f64>> = outcomes.iter().filter_map(|o| o.0.value().map(<[f64]>::to_vec)).collect();
    let estimated: Vec<Vec<f64>> = outcomes.iter().filter_map(|o| o.1.value().map(<[f64]>::to_vec)).collect();
    Ok(InvarianceStudy {
        known: scaled_covariance(&known, model.theta(), n),
        estimated: scaled_covariance(&estimated, model.theta(), n),
        eligible_known: known.len(),
        eligible_estimated: estimated.len(),
        exact_domain: outcomes.iter().filter(|o| o.2).count(),
    })
}
