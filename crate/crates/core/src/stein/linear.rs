use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::Sample;
use crate::models::{exact_expectation, Family, ModelSpec, Setting};
use crate::numerics::linalg;

use super::estimate::{check_sample, EstimateResult, NeReason};
use super::TestFunction;

/// The stacked Stein operator written as `M(k) g(θ)`.
///
/// `M(k)` is `q × (q+1)` with `q` the parameter dimension, and the last entry
/// of `g(θ)` is 1, so `M̄ g = 0` is a square linear system in the first `q`
/// entries of `g`.
#[derive(Debug, Clone)]
pub struct LinearSteinForm {
    setting: Setting,
    fs: Vec<TestFunction>,
}

impl LinearSteinForm {
    /// `fs` holds one test function, or two for BNB.
    pub fn new(setting: &Setting, fs: Vec<TestFunction>) -> Result<Self> {
        let needed = if setting.family() == Family::BetaNegBinomial { 2 } else { 1 };
        if fs.len() != needed {
            return Err(Error::Usage(format!(
                "`{}` needs {needed} test function(s), got {}",
                setting.family(),
                fs.len()
            )));
        }
        Ok(Self {
            setting: setting.clone(),
            fs,
        })
    }

    pub fn setting(&self) -> &Setting {
        &self.setting
    }

    pub fn test_functions(&self) -> &[TestFunction] {
        &self.fs
    }

    /// Number of estimating equations, equal to the parameter dimension.
    pub fn q(&self) -> usize {
        self.setting.theta_dim()
    }

    /// Length of `g(θ)`.
    pub fn q_tilde(&self) -> usize {
        self.q() + 1
    }

    pub fn m(&self, k: &[i64]) -> DMatrix<f64> {
        let q = self.q();
        let mut out = DMatrix::zeros(q, q + 1);
        self.fill_m(k, &mut out);
        out
    }

    fn fill_m(&self, k: &[i64], out: &mut DMatrix<f64>) {
        let s = &self.setting;
        let support = s.support();
        let fx = |f: &TestFunction, p: &[i64]| f.evaluate_on(support, p);
        if s.family().is_multivariate() {
            let f = &self.fs[0];
            let d = k.len();
            let total = k.iter().sum::<i64>() as f64;
            let r = s.r();
            let f_here = fx(f, k);
            let mut shifted = k.to_vec();
            out.fill(0.0);
            for i in 0..d {
                shifted[i] += 1;
                let f_up = fx(f, &shifted);
                shifted[i] -= 1;
                let ki = k[i] as f64;
                if s.family() == Family::DirichletNegMultinomial {
                    for j in 0..d {
                        out[(i, j)] = -ki * f_here;
                    }
                    out[(i, i)] += (total + r) * f_up;
                    out[(i, d)] = (total + r) * ki * f_up - ki * (total - 1.0 + r + s.alpha0()) * f_here;
                } else {
                    out[(i, i)] = (total + r) * f_up;
                    out[(i, d)] = -ki * f_here;
                }
            }
            return;
        }
        let kk = k[0];
        let x = kk as f64;
        let f0 = fx(&self.fs[0], &[kk]);
        let f1 = fx(&self.fs[0], &[kk + 1]);
        match s.family() {
            Family::Poisson | Family::TruncPoisson => {
                out[(0, 0)] = f1;
                out[(0, 1)] = -x * f0;
            }
            Family::Binomial | Family::TruncBinomial => {
                out[(0, 0)] = -f0;
                out[(0, 1)] = (s.m() as f64 - x) / (x + 1.0) * f1;
            }
            Family::YuleSimon => {
                out[(0, 0)] = -f0;
                out[(0, 1)] = x * f1 - x * f0;
            }
            Family::Logarithmic => {
                out[(0, 0)] = x / (x + 1.0) * f1;
                out[(0, 1)] = -f0;
            }
            Family::BetaNegBinomial => {
                let r = s.r();
                for (j, f) in self.fs.iter().enumerate() {
                    let (f0, f1) = (fx(f, &[kk]), fx(f, &[kk + 1]));
                    out[(j, 0)] = -x * f0;
                    out[(j, 1)] = (r + x) * f1 - x * f0;
                    out[(j, 2)] = (r + x) * x * f1 - (r + x - 1.0) * x * f0;
                }
            }
            _ => unreachable!("multivariate families handled above"),
        }
    }

    pub fn g(&self, theta: &[f64]) -> DVector<f64> {
        let q = self.q();
        let mut out = DVector::from_element(q + 1, 1.0);
        match self.setting.family() {
            Family::Binomial | Family::TruncBinomial => out[0] = (1.0 - theta[0]) / theta[0],
            _ => out.rows_mut(0, q).copy_from_slice(theta),
        }
        out
    }

    /// `∂g/∂θ`, a `(q+1) × q` matrix.
    pub fn dg(&self, theta: &[f64]) -> DMatrix<f64> {
        let q = self.q();
        let mut out = DMatrix::zeros(q + 1, q);
        match self.setting.family() {
            Family::Binomial | Family::TruncBinomial => out[(0, 0)] = -1.0 / (theta[0] * theta[0]),
            _ => out.view_mut((0, 0), (q, q)).fill_with_identity(),
        }
        out
    }

    /// `θ` from the leading `q` entries of `g(θ)`; `None` when no parameter
    /// maps there.
    pub fn g_inverse(&self, head: &[f64]) -> Option<Vec<f64>> {
        match self.setting.family() {
            Family::Binomial | Family::TruncBinomial => {
                let p = 1.0 / (1.0 + head[0]);
                p.is_finite().then(|| vec![p])
            }
            _ => Some(head.to_vec()),
        }
    }

    /// `(M(k) g(θ))`, the stacked Stein operator.
    pub fn apply(&self, k: &[i64], theta: &[f64]) -> DVector<f64> {
        self.m(k) * self.g(theta)
    }

    fn mean_m(&self, sample: &Sample) -> DMatrix<f64> {
        let q = self.q();
        let mut acc = DMatrix::zeros(q, q + 1);
        let mut scratch = DMatrix::zeros(q, q + 1);
        for k in sample.rows() {
            self.fill_m(k, &mut scratch);
            acc += &scratch;
        }
        acc / sample.len() as f64
    }
}

/// Solves `M̄ g(θ) = 0` for `g`, then inverts `g`.
pub fn solve_linear_stein_system(form: &LinearSteinForm, sample: &Sample) -> Result<EstimateResult> {
    check_sample(&form.setting, sample)?;
    let q = form.q();
    let m_bar = form.mean_m(sample);
    let square = m_bar.columns(0, q).into_owned();
    let rhs = -m_bar.column(q).into_owned();
    let head = match linalg::solve(&square, &rhs) {
        Ok(h) => h,
        Err(Error::Numerical(_)) => return Ok(EstimateResult::not_eligible(NeReason::SingularSystem)),
        Err(e) => return Err(e),
    };
    Ok(match form.g_inverse(head.as_slice()) {
        Some(theta) => EstimateResult::checked(&form.setting, theta),
        None => EstimateResult::not_eligible(NeReason::SingularSystem),
    })
}

/// How the expectations in the sandwich formula are evaluated.
#[derive(Debug, Clone, Copy)]
pub enum CovarianceMode<'a> {
    /// Exact sums under the model.
    Exact,
    /// Sample means, with `θ` replaced by the linear-system estimate.
    Empirical(&'a Sample),
}

/// Asymptotic covariance `J⁻¹ V J⁻ᵀ` of `√n (θ̂ − θ)`, with
/// `J = E[M(X)] ∂g(θ)` and `V = E[(M(X) g(θ))(M(X) g(θ))ᵀ]`.
pub fn sandwich_covariance(model: &ModelSpec, form: &LinearSteinForm, mode: CovarianceMode<'_>) -> Result<DMatrix<f64>> {
    if form.setting.family() != model.family() || form.setting.support() != model.support() {
        return Err(Error::Usage("the linear form was built for a different setting".into()));
    }
    let q = form.q();
    let width = q * (q + 1);
    // Flattened E[M] followed by E[(Mg)(Mg)ᵀ].
    let moments = |g: &DVector<f64>, k: &[i64]| -> Vec<f64> {
        let m = form.m(k);
        let a = &m * g;
        let mut v = Vec::with_capacity(width + q * q);
        v.extend(m.iter().copied());
        v.extend((&a * a.transpose()).iter().copied());
        v
    };
    let (theta, sums) = match mode {
        CovarianceMode::Exact => {
            let theta = model.theta().to_vec();
            let g = form.g(&theta);
            let sums = exact_expectation(model, |k| moments(&g, k))?;
            (theta, sums)
        }
        CovarianceMode::Empirical(sample) => {
            let est = solve_linear_stein_system(form, sample)?;
            let Some(theta) = est.value().map(<[f64]>::to_vec) else {
                return Err(Error::Numerical(format!(
                    "no plug-in estimate for the empirical covariance ({})",
                    est.ne_reason()
                )));
            };
            let g = form.g(&theta);
            let mut sums = vec![0.0; width + q * q];
            for k in sample.rows() {
                for (s, v) in sums.iter_mut().zip(moments(&g, k)) {
                    *s += v;
                }
            }
            let n = sample.len() as f64;
            sums.iter_mut().for_each(|s| *s /= n);
            (theta, sums)
        }
    };
    let mean_m = DMatrix::from_column_slice(q, q + 1, &sums[..width]);
    let v = DMatrix::from_column_slice(q, q, &sums[width..]);
    let j = mean_m * form.dg(&theta);
    let j_inv = linalg::invert(&j)?;
    Ok(&j_inv * v * j_inv.transpose())
}
