use crate::error::{Error, Result};
use crate::numerics::{log_beta_unchecked, log_choose, log_factorial, log_gamma_unchecked, log_sum_exp};

use super::{Family, ModelSpec};

/// Stop extending a tail once a term is this far (in log units) below the
/// running sum.
const TAIL_LOG_GAP: f64 = 40.0;
const TAIL_MAX_POINTS: i64 = 1_000_000;

/// Normalized pmf of a model, with the truncation constant computed once.
#[derive(Debug, Clone)]
pub struct PmfEval {
    model: ModelSpec,
    log_norm: f64,
}

impl PmfEval {
    pub fn new(model: &ModelSpec) -> Result<Self> {
        let log_norm = if model.family().is_truncated() {
            truncated_log_mass(model)?
        } else {
            0.0
        };
        Ok(Self {
            model: model.clone(),
            log_norm,
        })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    /// `ln P_parent(U)` for truncated families, 0 otherwise.
    pub fn log_truncated_mass(&self) -> f64 {
        self.log_norm
    }

    pub fn log_pmf(&self, k: &[i64]) -> Result<f64> {
        if !self.model.support().contains(k) {
            return Err(Error::Domain(format!(
                "point {k:?} is outside the support {}",
                self.model.support()
            )));
        }
        Ok(self.log_pmf_unchecked(k))
    }

    pub fn pmf(&self, k: &[i64]) -> Result<f64> {
        self.log_pmf(k).map(f64::exp)
    }

    pub(crate) fn log_pmf_unchecked(&self, k: &[i64]) -> f64 {
        parent_log_pmf(&self.model, k) - self.log_norm
    }
}

/// Natural log of the normalized pmf at `k`.
///
/// For truncated families this recomputes the normalizing sum; build a
/// [`PmfEval`] when evaluating many points.
pub fn log_pmf(model: &ModelSpec, k: &[i64]) -> Result<f64> {
    PmfEval::new(model)?.log_pmf(k)
}

/// Log-pmf of the untruncated parent family (the family itself when it is
/// not truncated).
pub(crate) fn parent_log_pmf(model: &ModelSpec, k: &[i64]) -> f64 {
    let th = model.theta();
    let s = model.setting();
    match model.family() {
        Family::Poisson | Family::TruncPoisson => poisson_log_pmf(th[0], k[0]),
        Family::Binomial | Family::TruncBinomial => binomial_log_pmf(s.m(), th[0], k[0]),
        Family::YuleSimon => {
            let rho = th[0];
            rho.ln() + log_beta_unchecked(k[0] as f64, rho + 1.0)
        }
        Family::BetaNegBinomial => {
            let (a, b, r) = (th[0], th[1], s.r());
            let kf = k[0] as f64;
            log_beta_unchecked(r + kf, a + b) - log_beta_unchecked(r, a)
                + log_gamma_unchecked(kf + b)
                - log_factorial(k[0])
                - log_gamma_unchecked(b)
        }
        Family::Logarithmic => {
            let p = th[0];
            k[0] as f64 * p.ln() - (k[0] as f64).ln() - (-(-p).ln_1p()).ln()
        }
        Family::NegMultinomial | Family::TruncNegMultinomial => neg_multinomial_log_pmf(s.r(), th, k),
        Family::DirichletNegMultinomial => {
            let (r, a0) = (s.r(), s.alpha0());
            let total: i64 = k.iter().sum();
            let asum: f64 = th.iter().sum();
            let mut v = log_beta_unchecked(r + total as f64, a0 + asum) - log_beta_unchecked(r, a0);
            for (&ki, &ai) in k.iter().zip(th) {
                v += log_gamma_unchecked(ki as f64 + ai) - log_factorial(ki) - log_gamma_unchecked(ai);
            }
            v
        }
    }
}

pub(crate) fn poisson_log_pmf(lambda: f64, k: i64) -> f64 {
    let kf = k as f64;
    let term = if k == 0 { 0.0 } else { kf * lambda.ln() };
    -lambda + term - log_factorial(k)
}

pub(crate) fn binomial_log_pmf(m: u64, p: f64, k: i64) -> f64 {
    let kf = k as f64;
    log_choose(m, k as u64) + kf * p.ln() + (m as f64 - kf) * (-p).ln_1p()
}

pub(crate) fn neg_multinomial_log_pmf(r: f64, p: &[f64], k: &[i64]) -> f64 {
    let p0 = 1.0 - p.iter().sum::<f64>();
    let total: i64 = k.iter().sum();
    let mut v = log_gamma_unchecked(r + total as f64) - log_gamma_unchecked(r) + r * p0.ln();
    for (&ki, &pi) in k.iter().zip(p) {
        if ki > 0 {
            v += ki as f64 * pi.ln();
        }
        v -= log_factorial(ki);
    }
    v
}

/// `ln Σ_{k∈U} p_parent(k)` for a truncated model.
fn truncated_log_mass(model: &ModelSpec) -> Result<f64> {
    let support = model.support();
    if support.is_bounded() {
        let mut terms = Vec::with_capacity(support.cardinality().unwrap_or(0).min(1 << 24) as usize);
        support.for_each_point(|k| terms.push(parent_log_pmf(model, k)))?;
        return Ok(log_sum_exp(&terms));
    }
    // Only the truncated Poisson admits an infinite upper bound.
    debug_assert_eq!(model.family(), Family::TruncPoisson);
    let lambda = model.theta()[0];
    let a = support.lower_finite(0).expect("validated lower bound");
    let mut terms = Vec::new();
    let mut k = a;
    let mut running = f64::NEG_INFINITY;
    loop {
        let t = poisson_log_pmf(lambda, k);
        terms.push(t);
        running = log_sum_exp(&[running, t]);
        if k as f64 > lambda && t < running - TAIL_LOG_GAP {
            break;
        }
        if k - a > TAIL_MAX_POINTS {
            return Err(Error::Numerical("Poisson tail sum did not converge".into()));
        }
        k += 1;
    }
    Ok(log_sum_exp(&terms))
}

/// Stein weight `τ_θ` of a model.
#[derive(Debug, Clone, Copy)]
pub struct TauWeight<'a> {
    model: &'a ModelSpec,
}

impl<'a> TauWeight<'a> {
    pub(crate) fn new(model: &'a ModelSpec) -> Self {
        Self { model }
    }

    /// `(τ^{(1)}(k), …, τ^{(d)}(k))`.
    pub fn evaluate(&self, k: &[i64]) -> Vec<f64> {
        let th = self.model.theta();
        let s = self.model.setting();
        let kf = k[0] as f64;
        match self.model.family() {
            Family::Poisson | Family::TruncPoisson => vec![kf],
            Family::Binomial | Family::TruncBinomial => vec![(1.0 - th[0]) / th[0]],
            Family::YuleSimon => vec![kf + th[0]],
            Family::BetaNegBinomial => vec![(s.r() + kf + th[0] + th[1] - 1.0) * kf],
            Family::Logarithmic => vec![1.0],
            Family::NegMultinomial | Family::TruncNegMultinomial => {
                k.iter().map(|&v| v as f64).collect()
            }
            Family::DirichletNegMultinomial => {
                let total = k.iter().sum::<i64>() as f64;
                let c = total - 1.0 + s.r() + s.alpha0() + th.iter().sum::<f64>();
                k.iter().map(|&v| v as f64 * c).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_gamma;

    #[test]
    fn poisson_at_zero() {
        let m = ModelSpec::poisson(1.0).unwrap();
        assert!((log_pmf(&m, &[0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn binomial_symmetric_midpoint() {
        let m = ModelSpec::binomial(2, 0.5).unwrap();
        assert!((log_pmf(&m, &[1]).unwrap() - 0.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn yule_simon_at_one() {
        let m = ModelSpec::yule_simon(1.0).unwrap();
        // ρ B(1, ρ+1) with B(1,2) from log-gamma values
        let oracle = 1f64.ln() + log_gamma(1.0).unwrap() + log_gamma(2.0).unwrap() - log_gamma(3.0).unwrap();
        assert!((log_pmf(&m, &[1]).unwrap() - oracle).abs() < 1e-14);
        assert!((oracle - 0.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn truncated_poisson_sums_to_one() {
        let m = ModelSpec::trunc_poisson(2.0, 2, Some(40)).unwrap();
        let eval = PmfEval::new(&m).unwrap();
        let total: f64 = (2..=40).map(|k| eval.pmf(&[k]).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_poisson_is_renormalized_parent() {
        let t = ModelSpec::trunc_poisson(2.0, 2, Some(40)).unwrap();
        let p = ModelSpec::poisson(2.0).unwrap();
        let te = PmfEval::new(&t).unwrap();
        let mass: f64 = (2..=40).map(|k| log_pmf(&p, &[k]).unwrap().exp()).sum();
        for k in 2..=40 {
            let lhs = te.pmf(&[k]).unwrap() * mass;
            let rhs = log_pmf(&p, &[k]).unwrap().exp();
            assert!((lhs - rhs).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn open_truncated_poisson_tail_mass() {
        // P(X >= 6) for λ = 0.9 by complement of a finite sum
        let t = ModelSpec::trunc_poisson(0.9, 6, None).unwrap();
        let te = PmfEval::new(&t).unwrap();
        let below: f64 = (0..6).map(|k| poisson_log_pmf(0.9, k).exp()).sum();
        assert!((te.log_truncated_mass().exp() - (1.0 - below)).abs() < 1e-15);
    }

    #[test]
    fn outside_support_is_domain_error() {
        let m = ModelSpec::trunc_binomial(10, 0.8, 1, 8).unwrap();
        assert!(matches!(log_pmf(&m, &[9]), Err(Error::Domain(_))));
        let y = ModelSpec::yule_simon(2.0).unwrap();
        assert!(log_pmf(&y, &[0]).is_err());
    }

    #[test]
    fn logarithmic_closed_form() {
        let p: f64 = 0.3;
        let m = ModelSpec::logarithmic(p).unwrap();
        for k in 1..6 {
            let direct = -1.0 / (1.0 - p).ln() * p.powi(k as i32) / k as f64;
            assert!((log_pmf(&m, &[k]).unwrap().exp() - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn tau_values() {
        let p = ModelSpec::poisson(3.0).unwrap();
        assert_eq!(p.tau().evaluate(&[5]), vec![5.0]);
        let l = ModelSpec::logarithmic(0.4).unwrap();
        assert_eq!(l.tau().evaluate(&[17]), vec![1.0]);
        let nm = ModelSpec::neg_multinomial(2.0, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(nm.tau().evaluate(&[2, 0, 7]), vec![2.0, 0.0, 7.0]);
        let d = ModelSpec::dirichlet_neg_multinomial(5.0, 2.0, &[1.0, 2.0]).unwrap();
        // S - 1 + r + α0 + Σα = 3 - 1 + 5 + 2 + 3 = 12
        assert_eq!(d.tau().evaluate(&[1, 2]), vec![12.0, 24.0]);
    }

    #[test]
    fn tau_positive_on_interior() {
        let models = [
            ModelSpec::binomial(10, 0.3).unwrap(),
            ModelSpec::yule_simon(0.5).unwrap(),
            ModelSpec::beta_neg_binomial(2.0, 3.0, 1.5).unwrap(),
            ModelSpec::trunc_poisson(1.0, 2, Some(9)).unwrap(),
        ];
        for m in &models {
            for k in 3..8 {
                assert!(m.tau().evaluate(&[k])[0] > 0.0, "{:?}", m.family());
            }
        }
    }
}
