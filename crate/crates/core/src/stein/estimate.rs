use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Sample;
use crate::models::{Family, Setting, ThetaViolation};
use crate::numerics::linalg;

use super::TestFunction;

/// Denominators at or below this magnitude count as zero.
pub const ZERO_DENOMINATOR: f64 = 1e-300;

/// Why an estimate was not eligible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeReason {
    Eligible,
    NegativeParameter,
    OutOfDomain,
    SingularSystem,
    OptimizerFailure,
    RuntimeExceeded,
    OutlierTruncated,
}

impl NeReason {
    pub fn tag(self) -> &'static str {
        match self {
            NeReason::Eligible => "none",
            NeReason::NegativeParameter => "negative_parameter",
            NeReason::OutOfDomain => "out_of_domain",
            NeReason::SingularSystem => "singular_system",
            NeReason::OptimizerFailure => "optimizer_failure",
            NeReason::RuntimeExceeded => "runtime_exceeded",
            NeReason::OutlierTruncated => "outlier_truncated",
        }
    }
}

impl fmt::Display for NeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for NeReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            NeReason::Eligible,
            NeReason::NegativeParameter,
            NeReason::OutOfDomain,
            NeReason::SingularSystem,
            NeReason::OptimizerFailure,
            NeReason::RuntimeExceeded,
            NeReason::OutlierTruncated,
        ]
        .into_iter()
        .find(|r| r.tag() == s)
        .ok_or_else(|| Error::Usage(format!("unknown NE reason `{s}`")))
    }
}

/// A parameter estimate, or the reason it is not eligible.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    value: Option<Vec<f64>>,
    reason: NeReason,
}

impl EstimateResult {
    pub fn eligible(value: Vec<f64>) -> Self {
        Self {
            value: Some(value),
            reason: NeReason::Eligible,
        }
    }

    pub fn not_eligible(reason: NeReason) -> Self {
        assert_ne!(reason, NeReason::Eligible, "an NE result needs a reason");
        Self { value: None, reason }
    }

    /// Eligible if `theta` satisfies the setting's constraints, otherwise NE
    /// with the matching reason.
    pub fn checked(setting: &Setting, theta: Vec<f64>) -> Self {
        match setting.check_theta(&theta) {
            Ok(()) => Self::eligible(theta),
            Err(v) => Self::not_eligible(violation_reason(&v)),
        }
    }

    pub fn value(&self) -> Option<&[f64]> {
        self.value.as_deref()
    }

    pub fn ne_reason(&self) -> NeReason {
        self.reason
    }

    pub fn is_eligible(&self) -> bool {
        self.value.is_some()
    }
}

pub(crate) fn violation_reason(v: &ThetaViolation) -> NeReason {
    match v {
        ThetaViolation::NotPositive(..) => NeReason::NegativeParameter,
        ThetaViolation::AboveOne(..) | ThetaViolation::SimplexExceeded(_) => NeReason::OutOfDomain,
        ThetaViolation::NotFinite | ThetaViolation::Dimension { .. } => NeReason::SingularSystem,
    }
}

pub(crate) fn check_sample(setting: &Setting, sample: &Sample) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::Usage("empty sample".into()));
    }
    if sample.dim() != setting.dim() {
        return Err(Error::Usage(format!(
            "sample has {} columns, the model has dimension {}",
            sample.dim(),
            setting.dim()
        )));
    }
    if let Some((i, row)) = sample
        .rows()
        .enumerate()
        .find(|(_, r)| !setting.support().contains(r))
    {
        return Err(Error::Domain(format!(
            "observation {} ({row:?}) is outside the support {}",
            i + 1,
            setting.support()
        )));
    }
    Ok(())
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den.abs() > ZERO_DENOMINATOR).then(|| num / den)
}

fn mean(sample: &Sample, mut g: impl FnMut(&[i64]) -> f64) -> f64 {
    sample.rows().map(&mut g).sum::<f64>() / sample.len() as f64
}

/// Closed-form Stein estimator of `setting`'s family.
///
/// `fs` holds one test function, or two for BNB. Test functions are taken as
/// zero outside the setting's support.
pub fn stein_estimate(setting: &Setting, sample: &Sample, fs: &[TestFunction]) -> Result<EstimateResult> {
    check_sample(setting, sample)?;
    let needed = if setting.family() == Family::BetaNegBinomial { 2 } else { 1 };
    if fs.len() != needed {
        return Err(Error::Usage(format!(
            "`{}` needs {needed} test function(s), got {}",
            setting.family(),
            fs.len()
        )));
    }
    let support = setting.support();
    let f = |k: &[i64]| fs[0].evaluate_on(support, k);
    let f_up = |x: i64| fs[0].evaluate_on(support, &[x + 1]);
    let x = |k: &[i64]| k[0] as f64;

    let theta = match setting.family() {
        Family::Poisson | Family::TruncPoisson => {
            ratio(mean(sample, |k| x(k) * f(k)), mean(sample, |k| f_up(k[0]))).map(|l| vec![l])
        }
        Family::Binomial | Family::TruncBinomial => {
            let m = setting.m() as f64;
            let num = mean(sample, |k| (m - x(k)) * f_up(k[0]) / (x(k) + 1.0));
            // (1-p)/p = num / mean f(X)
            ratio(num, mean(sample, f)).map(|odds| vec![1.0 / (1.0 + odds)])
        }
        Family::YuleSimon => {
            let num = mean(sample, |k| x(k) * f_up(k[0])) - mean(sample, |k| x(k) * f(k));
            ratio(num, mean(sample, f)).map(|r| vec![r])
        }
        Family::Logarithmic => {
            let den = mean(sample, |k| x(k) * f_up(k[0]) / (x(k) + 1.0));
            ratio(mean(sample, f), den).map(|p| vec![p])
        }
        Family::BetaNegBinomial => return Ok(bnb(setting, sample, fs)),
        Family::NegMultinomial | Family::TruncNegMultinomial => {
            neg_multinomial(setting, sample, &fs[0])
        }
        Family::DirichletNegMultinomial => return dnm(setting, sample, &fs[0]),
    };
    Ok(match theta {
        Some(t) => EstimateResult::checked(setting, t),
        None => EstimateResult::not_eligible(NeReason::SingularSystem),
    })
}

/// Moments `M^(1..6)` of the two BNB estimating equations
/// `M1 α + M2 β + M3 = 0`, `M4 α + M5 β + M6 = 0`.
pub(crate) fn bnb_moments(setting: &Setting, sample: &Sample, fs: &[TestFunction]) -> [f64; 6] {
    let r = setting.r();
    let support = setting.support();
    let mut out = [0.0; 6];
    for (j, f) in fs.iter().enumerate() {
        let fx = |v: i64| f.evaluate_on(support, &[v]);
        let m_a = -mean(sample, |k| k[0] as f64 * fx(k[0]));
        let m_b = mean(sample, |k| (r + k[0] as f64) * fx(k[0] + 1)) + m_a;
        let m_c = mean(sample, |k| {
            let x = k[0] as f64;
            (r + x) * x * fx(k[0] + 1) - (r + x - 1.0) * x * fx(k[0])
        });
        out[3 * j..3 * j + 3].copy_from_slice(&[m_a, m_b, m_c]);
    }
    out
}

fn bnb(setting: &Setting, sample: &Sample, fs: &[TestFunction]) -> EstimateResult {
    let [m1, m2, m3, m4, m5, m6] = bnb_moments(setting, sample, fs);
    let a = nalgebra::DMatrix::from_row_slice(2, 2, &[m1, m2, m4, m5]);
    let det = m2 * m4 - m1 * m5;
    if det.abs() <= ZERO_DENOMINATOR || linalg::condition_number(&a) > linalg::MAX_CONDITION {
        return EstimateResult::not_eligible(NeReason::SingularSystem);
    }
    let alpha = (m3 * m5 - m2 * m6) / det;
    let beta = (m1 * m6 - m3 * m4) / det;
    EstimateResult::checked(setting, vec![alpha, beta])
}

fn neg_multinomial(setting: &Setting, sample: &Sample, f: &TestFunction) -> Option<Vec<f64>> {
    let r = setting.r();
    let support = setting.support();
    let d = setting.dim();
    let mut shifted = vec![0i64; d];
    (0..d)
        .map(|i| {
            let num = mean(sample, |k| k[i] as f64 * f.evaluate_on(support, k));
            let den = mean(sample, |k| {
                shifted.copy_from_slice(k);
                shifted[i] += 1;
                let total = k.iter().sum::<i64>() as f64;
                (total + r) * f.evaluate_on(support, &shifted)
            });
            ratio(num, den)
        })
        .collect()
}

/// `(A_n, b_n)` of the DNM estimating equations `A_n α = b_n`.
pub fn dnm_system(setting: &Setting, sample: &Sample, f: &TestFunction) -> (Vec<Vec<f64>>, Vec<f64>) {
    let (r, a0) = (setting.r(), setting.alpha0());
    let support = setting.support();
    let d = setting.dim();
    let n = sample.len() as f64;
    let mut diag = vec![0.0; d];
    let mut xf = vec![0.0; d];
    let mut b = vec![0.0; d];
    let mut shifted = vec![0i64; d];
    for k in sample.rows() {
        let total = k.iter().sum::<i64>() as f64;
        let fk = f.evaluate_on(support, k);
        for i in 0..d {
            shifted.copy_from_slice(k);
            shifted[i] += 1;
            let f_up = f.evaluate_on(support, &shifted);
            let xi = k[i] as f64;
            diag[i] += (total + r) * f_up;
            xf[i] += xi * fk;
            b[i] += total * xi * fk + (r + a0 - 1.0) * xi * fk - total * xi * f_up - r * xi * f_up;
        }
    }
    let a = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { (diag[i] - xf[i]) / n } else { -xf[i] / n })
                .collect()
        })
        .collect();
    (a, b.iter().map(|v| v / n).collect())
}

fn dnm(setting: &Setting, sample: &Sample, f: &TestFunction) -> Result<EstimateResult> {
    let (a, b) = dnm_system(setting, sample, f);
    let d = b.len();
    let a = nalgebra::DMatrix::from_fn(d, d, |i, j| a[i][j]);
    let b = nalgebra::DVector::from_vec(b);
    Ok(match linalg::solve(&a, &b) {
        Ok(x) => EstimateResult::checked(setting, x.iter().copied().collect()),
        Err(Error::Numerical(_)) => EstimateResult::not_eligible(NeReason::SingularSystem),
        Err(e) => return Err(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(v: &[i64]) -> Sample {
        Sample::univariate(v.to_vec())
    }

    fn est(setting: &Setting, data: &[i64], f: TestFunction) -> Vec<f64> {
        stein_estimate(setting, &uni(data), &[f]).unwrap().value().unwrap().to_vec()
    }

    #[test]
    fn poisson_examples() {
        let s = Setting::poisson();
        assert_eq!(est(&s, &[2, 3, 4], TestFunction::One), vec![3.0]);
        let v = est(&s, &[0, 1, 2], TestFunction::Identity)[0];
        assert!((v - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn binomial_example() {
        let s = Setting::binomial(4).unwrap();
        let v = est(&s, &[1, 2], TestFunction::Identity)[0];
        assert!((v - 0.375).abs() < 1e-15);
    }

    #[test]
    fn yule_simon_example() {
        let s = Setting::yule_simon();
        let v = est(&s, &[1, 1, 2], TestFunction::Log)[0];
        assert!((v - 2.0 * 3f64.ln() / 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn vanishing_test_function_is_singular() {
        let s = Setting::logarithmic();
        let r = stein_estimate(&s, &uni(&[1, 2, 3]), &[TestFunction::Zero]).unwrap();
        assert_eq!(r.ne_reason(), NeReason::SingularSystem);
    }

    #[test]
    fn all_ones_logarithmic_hits_the_boundary() {
        // f = k - 1 vanishes on every observation, so p̂ = 0
        let s = Setting::logarithmic();
        let r = stein_estimate(&s, &uni(&[1, 1, 1]), &[TestFunction::KMinus1]).unwrap();
        assert_eq!(r.ne_reason(), NeReason::NegativeParameter);
    }

    #[test]
    fn negative_estimate_is_flagged() {
        // mean(X f(X+1)) - mean(X f(X)) < 0 with f = -k picks a negative ρ
        let s = Setting::yule_simon();
        let f = TestFunction::custom("neg", |k| if k[0] == 1 { 0.0 } else { 1.0 / k[0] as f64 });
        let r = stein_estimate(&s, &uni(&[2, 3, 5]), &[f]).unwrap();
        assert_eq!(r.ne_reason(), NeReason::NegativeParameter);
        assert!(r.value().is_none());
    }

    #[test]
    fn empty_and_out_of_support_samples() {
        let s = Setting::yule_simon();
        assert!(matches!(
            stein_estimate(&s, &uni(&[]), &[TestFunction::Log]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            stein_estimate(&s, &uni(&[0, 2]), &[TestFunction::Log]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bnb_needs_two_functions() {
        let s = Setting::beta_neg_binomial(3.0).unwrap();
        assert!(stein_estimate(&s, &uni(&[1, 2]), &[TestFunction::One]).is_err());
    }

    #[test]
    fn neg_multinomial_with_one_is_closed_form_mle() {
        let s = Setting::neg_multinomial(2, 3.0).unwrap();
        let sample = Sample::from_rows(&[vec![1, 2], vec![0, 4], vec![3, 1]]).unwrap();
        let v = stein_estimate(&s, &sample, &[TestFunction::One]).unwrap();
        let v = v.value().unwrap();
        // x̄ = (4/3, 7/3), p_i = x̄_i / (r + Σ x̄)
        let den = 3.0 + 11.0 / 3.0;
        assert!((v[0] - 4.0 / 3.0 / den).abs() < 1e-15);
        assert!((v[1] - 7.0 / 3.0 / den).abs() < 1e-15);
    }

    #[test]
    fn ne_reason_tags_round_trip() {
        for r in [NeReason::Eligible, NeReason::OutlierTruncated, NeReason::SingularSystem] {
            assert_eq!(r.tag().parse::<NeReason>().unwrap(), r);
        }
    }
}
