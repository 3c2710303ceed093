//! Catalog of lattice distributions.
//!
//! A [`Setting`] fixes everything that is known about a model: the family,
//! hyperparameters such as the number of trials `m` or the size parameter `r`,
//! and the support box. A [`ModelSpec`] adds the estimable parameter vector.

mod expectation;
mod pmf;
mod sampling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Bound, LatticeBox};

pub use expectation::{exact_expectation, TAIL_CAP_POINTS};
pub use pmf::{log_pmf, PmfEval, TauWeight};
pub use sampling::{sample, Sampler};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Poisson,
    Binomial,
    YuleSimon,
    BetaNegBinomial,
    Logarithmic,
    TruncPoisson,
    TruncBinomial,
    NegMultinomial,
    TruncNegMultinomial,
    DirichletNegMultinomial,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Poisson,
        Family::Binomial,
        Family::YuleSimon,
        Family::BetaNegBinomial,
        Family::Logarithmic,
        Family::TruncPoisson,
        Family::TruncBinomial,
        Family::NegMultinomial,
        Family::TruncNegMultinomial,
        Family::DirichletNegMultinomial,
    ];

    /// Short tag used in reports and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            Family::Poisson => "poisson",
            Family::Binomial => "binomial",
            Family::YuleSimon => "yulesimon",
            Family::BetaNegBinomial => "bnb",
            Family::Logarithmic => "logarithmic",
            Family::TruncPoisson => "truncpoisson",
            Family::TruncBinomial => "truncbinomial",
            Family::NegMultinomial => "nm",
            Family::TruncNegMultinomial => "tnm",
            Family::DirichletNegMultinomial => "dnm",
        }
    }

    pub fn is_truncated(self) -> bool {
        matches!(
            self,
            Family::TruncPoisson | Family::TruncBinomial | Family::TruncNegMultinomial
        )
    }

    pub fn is_multivariate(self) -> bool {
        matches!(
            self,
            Family::NegMultinomial | Family::TruncNegMultinomial | Family::DirichletNegMultinomial
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        Ok(match key.as_str() {
            "poisson" | "p" => Family::Poisson,
            "binomial" | "b" | "binom" => Family::Binomial,
            "yulesimon" | "ys" => Family::YuleSimon,
            "bnb" | "betanegbinomial" | "betanegativebinomial" => Family::BetaNegBinomial,
            "logarithmic" | "lg" | "log" => Family::Logarithmic,
            "truncpoisson" | "tp" | "truncatedpoisson" => Family::TruncPoisson,
            "truncbinomial" | "tb" | "truncatedbinomial" => Family::TruncBinomial,
            "nm" | "negmultinomial" | "negativemultinomial" => Family::NegMultinomial,
            "tnm" | "truncnegmultinomial" | "truncatednegativemultinomial" => {
                Family::TruncNegMultinomial
            }
            "dnm" | "dirichletnegmultinomial" | "dirichletnegativemultinomial" => {
                Family::DirichletNegMultinomial
            }
            _ => return Err(Error::Usage(format!("unknown model family `{s}`"))),
        })
    }
}

/// Known part of a model: family, hyperparameters and support.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    family: Family,
    trials: Option<u64>,
    size: Option<f64>,
    alpha0: Option<f64>,
    support: LatticeBox,
}

impl Setting {
    pub fn poisson() -> Self {
        Self::bare(Family::Poisson, LatticeBox::orthant(1, 0))
    }

    pub fn binomial(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidModel("binomial needs m >= 1".into()));
        }
        let mut s = Self::bare(Family::Binomial, LatticeBox::interval(0, Some(m as i64))?);
        s.trials = Some(m);
        Ok(s)
    }

    pub fn yule_simon() -> Self {
        Self::bare(Family::YuleSimon, LatticeBox::orthant(1, 1))
    }

    pub fn beta_neg_binomial(r: f64) -> Result<Self> {
        check_positive("r", r)?;
        let mut s = Self::bare(Family::BetaNegBinomial, LatticeBox::orthant(1, 0));
        s.size = Some(r);
        Ok(s)
    }

    pub fn logarithmic() -> Self {
        Self::bare(Family::Logarithmic, LatticeBox::orthant(1, 1))
    }

    /// Poisson restricted to `{a..b}`; `b = None` keeps the upper tail.
    pub fn trunc_poisson(a: i64, b: Option<i64>) -> Result<Self> {
        if a < 0 {
            return Err(Error::InvalidModel(format!("truncated Poisson needs a >= 0, got {a}")));
        }
        Ok(Self::bare(Family::TruncPoisson, LatticeBox::interval(a, b)?))
    }

    pub fn trunc_binomial(m: u64, a: i64, b: i64) -> Result<Self> {
        if a < 0 || b > m as i64 {
            return Err(Error::InvalidModel(format!(
                "truncated binomial needs 0 <= a < b <= m, got a={a}, b={b}, m={m}"
            )));
        }
        let mut s = Self::bare(Family::TruncBinomial, LatticeBox::interval(a, Some(b))?);
        s.trials = Some(m);
        Ok(s)
    }

    pub fn neg_multinomial(d: usize, r: f64) -> Result<Self> {
        check_positive("r", r)?;
        check_dim(d)?;
        let mut s = Self::bare(Family::NegMultinomial, LatticeBox::orthant(d, 0));
        s.size = Some(r);
        Ok(s)
    }

    pub fn trunc_neg_multinomial(r: f64, a: &[i64], b: &[i64]) -> Result<Self> {
        check_positive("r", r)?;
        check_dim(a.len())?;
        if a.iter().any(|&v| v < 0) {
            return Err(Error::InvalidModel("truncated negative multinomial needs a >= 0".into()));
        }
        let mut s = Self::bare(Family::TruncNegMultinomial, LatticeBox::finite(a, b)?);
        s.size = Some(r);
        Ok(s)
    }

    pub fn dirichlet_neg_multinomial(d: usize, r: f64, alpha0: f64) -> Result<Self> {
        check_positive("r", r)?;
        check_positive("alpha0", alpha0)?;
        check_dim(d)?;
        let mut s = Self::bare(Family::DirichletNegMultinomial, LatticeBox::orthant(d, 0));
        s.size = Some(r);
        s.alpha0 = Some(alpha0);
        Ok(s)
    }

    fn bare(family: Family, support: LatticeBox) -> Self {
        Self {
            family,
            trials: None,
            size: None,
            alpha0: None,
            support,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn support(&self) -> &LatticeBox {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    /// Number of trials `m` (binomial families).
    pub fn m(&self) -> u64 {
        self.trials.expect("family has no trial count")
    }

    /// Size parameter `r` (BNB, NM, TNM, DNM).
    pub fn r(&self) -> f64 {
        self.size.expect("family has no size parameter")
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0.expect("family has no alpha0")
    }

    pub fn trials(&self) -> Option<u64> {
        self.trials
    }

    pub fn size(&self) -> Option<f64> {
        self.size
    }

    pub fn alpha0_opt(&self) -> Option<f64> {
        self.alpha0
    }

    /// Same family and hyperparameters on a different box.
    ///
    /// Only truncated families accept a box other than their natural support.
    /// Degenerate axes (`a_i = b_i`) are allowed so that domain estimates can
    /// be represented.
    pub fn with_support(&self, support: LatticeBox) -> Result<Self> {
        if !self.family.is_truncated() {
            return Err(Error::Usage(format!(
                "the support of `{}` is fixed by the family",
                self.family
            )));
        }
        if support.dim() != self.dim() {
            return Err(Error::InvalidModel(format!(
                "box of dimension {} for a {}-dimensional model",
                support.dim(),
                self.dim()
            )));
        }
        for i in 0..support.dim() {
            let a = support.lower_finite(i).ok_or_else(|| {
                Error::InvalidModel("truncated families need finite lower bounds".into())
            })?;
            if a < 0 {
                return Err(Error::InvalidModel("lower bounds must be >= 0".into()));
            }
            match (self.family, support.upper()[i]) {
                (Family::TruncBinomial, Bound::Finite(b)) if b > self.m() as i64 => {
                    return Err(Error::InvalidModel(format!("upper bound {b} exceeds m")));
                }
                (Family::TruncPoisson, Bound::PlusInfinity) => {}
                (_, Bound::Finite(_)) => {}
                _ => {
                    return Err(Error::InvalidModel(format!(
                        "`{}` needs finite upper bounds",
                        self.family
                    )))
                }
            }
        }
        let mut s = self.clone();
        s.support = support;
        Ok(s)
    }

    pub fn theta_dim(&self) -> usize {
        match self.family {
            Family::BetaNegBinomial => 2,
            f if f.is_multivariate() => self.dim(),
            _ => 1,
        }
    }

    /// Component names of the parameter vector, as used in reports.
    pub fn param_names(&self) -> Vec<String> {
        match self.family {
            Family::Poisson | Family::TruncPoisson => vec!["lambda".into()],
            Family::Binomial | Family::TruncBinomial | Family::Logarithmic => vec!["p".into()],
            Family::YuleSimon => vec!["rho".into()],
            Family::BetaNegBinomial => vec!["alpha".into(), "beta".into()],
            Family::NegMultinomial | Family::TruncNegMultinomial => {
                (1..=self.dim()).map(|i| format!("p{i}")).collect()
            }
            Family::DirichletNegMultinomial => (1..=self.dim()).map(|i| format!("alpha{i}")).collect(),
        }
    }

    /// Checks the family's parameter constraints, returning a description of
    /// the first violation.
    pub fn check_theta(&self, theta: &[f64]) -> std::result::Result<(), ThetaViolation> {
        if theta.len() != self.theta_dim() {
            return Err(ThetaViolation::Dimension {
                expected: self.theta_dim(),
                got: theta.len(),
            });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(ThetaViolation::NotFinite);
        }
        let names = self.param_names();
        let positive = |i: usize| {
            if theta[i] > 0.0 {
                Ok(())
            } else {
                Err(ThetaViolation::NotPositive(names[i].clone(), theta[i]))
            }
        };
        match self.family {
            Family::Poisson | Family::TruncPoisson | Family::YuleSimon => positive(0),
            Family::BetaNegBinomial => positive(0).and(positive(1)),
            Family::Binomial | Family::TruncBinomial | Family::Logarithmic => {
                positive(0)?;
                if theta[0] < 1.0 {
                    Ok(())
                } else {
                    Err(ThetaViolation::AboveOne(names[0].clone(), theta[0]))
                }
            }
            Family::NegMultinomial | Family::TruncNegMultinomial => {
                for i in 0..theta.len() {
                    positive(i)?;
                }
                let p0 = 1.0 - theta.iter().sum::<f64>();
                if p0 > 0.0 {
                    Ok(())
                } else {
                    Err(ThetaViolation::SimplexExceeded(p0))
                }
            }
            Family::DirichletNegMultinomial => (0..theta.len()).try_for_each(positive),
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be > 0, got {v}")))
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidModel("dimension must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// A violated parameter constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaViolation {
    Dimension { expected: usize, got: usize },
    NotFinite,
    NotPositive(String, f64),
    AboveOne(String, f64),
    SimplexExceeded(f64),
}

impl fmt::Display for ThetaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaViolation::Dimension { expected, got } => {
                write!(f, "expected {expected} parameters, got {got}")
            }
            ThetaViolation::NotFinite => f.write_str("parameters must be finite"),
            ThetaViolation::NotPositive(name, v) => write!(f, "{name} must be > 0, got {v}"),
            ThetaViolation::AboveOne(name, v) => write!(f, "{name} must be < 1, got {v}"),
            ThetaViolation::SimplexExceeded(p0) => {
                write!(f, "p0 = 1 - sum(p) must be > 0, got {p0}")
            }
        }
    }
}

/// A fully specified model: a [`Setting`] plus a valid parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    setting: Setting,
    theta: Vec<f64>,
}

impl ModelSpec {
    pub fn new(setting: Setting, theta: Vec<f64>) -> Result<Self> {
        setting
            .check_theta(&theta)
            .map_err(|v| Error::InvalidModel(v.to_string()))?;
        Ok(Self { setting, theta })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::new(Setting::poisson(), vec![lambda])
    }

    pub fn binomial(m: u64, p: f64) -> Result<Self> {
        Self::new(Setting::binomial(m)?, vec![p])
    }

    pub fn yule_simon(rho: f64) -> Result<Self> {
        Self::new(Setting::yule_simon(), vec![rho])
    }

    pub fn beta_neg_binomial(alpha: f64, beta: f64, r: f64) -> Result<Self> {
        Self::new(Setting::beta_neg_binomial(r)?, vec![alpha, beta])
    }

    pub fn logarithmic(p: f64) -> Result<Self> {
        Self::new(Setting::logarithmic(), vec![p])
    }

    pub fn trunc_poisson(lambda: f64, a: i64, b: Option<i64>) -> Result<Self> {
        Self::new(Setting::trunc_poisson(a, b)?, vec![lambda])
    }

    pub fn trunc_binomial(m: u64, p: f64, a: i64, b: i64) -> Result<Self> {
        Self::new(Setting::trunc_binomial(m, a, b)?, vec![p])
    }

    pub fn neg_multinomial(r: f64, p: &[f64]) -> Result<Self> {
        Self::new(Setting::neg_multinomial(p.len(), r)?, p.to_vec())
    }

    pub fn trunc_neg_multinomial(r: f64, p: &[f64], a: &[i64], b: &[i64]) -> Result<Self> {
        if p.len() != a.len() {
            return Err(Error::InvalidModel("p and the box have different dimensions".into()));
        }
        Self::new(Setting::trunc_neg_multinomial(r, a, b)?, p.to_vec())
    }

    pub fn dirichlet_neg_multinomial(r: f64, alpha0: f64, alpha: &[f64]) -> Result<Self> {
        Self::new(
            Setting::dirichlet_neg_multinomial(alpha.len(), r, alpha0)?,
            alpha.to_vec(),
        )
    }

    pub fn setting(&self) -> &Setting {
        &self.setting
    }

    pub fn family(&self) -> Family {
        self.setting.family
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn support(&self) -> &LatticeBox {
        &self.setting.support
    }

    pub fn dim(&self) -> usize {
        self.setting.dim()
    }

    /// Same setting, different parameters.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        Self::new(self.setting.clone(), theta)
    }

    pub fn tau(&self) -> TauWeight<'_> {
        TauWeight::new(self)
    }
}
