use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{Bound, LatticeBox};
use crate::models::{Family, ModelSpec, Setting};

type CustomFn = Arc<dyn Fn(&[i64]) -> f64 + Send + Sync>;

/// Scalar test function on the lattice.
///
/// Multivariate operators apply the same scalar function along every axis.
#[derive(Clone)]
pub enum TestFunction {
    Zero,
    One,
    /// `k`, or `Σ k_i` on a multivariate lattice.
    Identity,
    /// `ln k`, or `ln Σ k_i`.
    Log,
    /// `k - 1`, or `Σ k_i - 1`.
    KMinus1,
    /// `k` except 0 at each listed point.
    MaskedIdentity { zeros: Vec<i64> },
    /// 0 when some `k_i = 0`, otherwise `1 / Σ k_i`.
    InvSumInterior,
    /// 0 on every finite face of the box, otherwise `Σ k_i`.
    SumInterior(LatticeBox),
    Custom { name: String, f: CustomFn },
}

impl TestFunction {
    pub fn custom(name: impl Into<String>, f: impl Fn(&[i64]) -> f64 + Send + Sync + 'static) -> Self {
        TestFunction::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            TestFunction::Zero => "zero",
            TestFunction::One => "one",
            TestFunction::Identity => "identity",
            TestFunction::Log => "log",
            TestFunction::KMinus1 => "k_minus_1",
            TestFunction::MaskedIdentity { .. } => "masked_identity",
            TestFunction::InvSumInterior => "inv_sum_interior",
            TestFunction::SumInterior(_) => "sum_interior",
            TestFunction::Custom { name, .. } => name,
        }
    }

    pub fn evaluate(&self, k: &[i64]) -> f64 {
        let total = || k.iter().sum::<i64>() as f64;
        match self {
            TestFunction::Zero => 0.0,
            TestFunction::One => 1.0,
            TestFunction::Identity => total(),
            TestFunction::Log => total().ln(),
            TestFunction::KMinus1 => total() - 1.0,
            TestFunction::MaskedIdentity { zeros } => {
                if zeros.contains(&k[0]) {
                    0.0
                } else {
                    k[0] as f64
                }
            }
            TestFunction::InvSumInterior => {
                if k.iter().any(|&v| v == 0) {
                    0.0
                } else {
                    1.0 / total()
                }
            }
            TestFunction::SumInterior(b) => {
                if b.on_face(k) {
                    0.0
                } else {
                    total()
                }
            }
            TestFunction::Custom { f, .. } => f(k),
        }
    }

    /// `f` extended by zero outside `support`.
    pub fn evaluate_on(&self, support: &LatticeBox, k: &[i64]) -> f64 {
        if support.contains(k) {
            self.evaluate(k)
        } else {
            0.0
        }
    }

    /// True if `f` is zero at every point on a finite face of `support`
    /// (`k_i = a_i` or `k_i = b_i`), checked over the whole face for bounded
    /// boxes and over a window of 25 steps per open axis otherwise.
    pub fn vanishes_on_boundary(&self, support: &LatticeBox) -> bool {
        boundary_points(support).iter().all(|k| self.evaluate(k) == 0.0)
    }

    /// True if `f` belongs to the Stein class of `model`: `f·p·τ^{(i)}`
    /// vanishes where axis `i` meets a finite lower bound (the upper side
    /// holds by the zero extension beyond `b`). Checked on the same points as
    /// [`Self::vanishes_on_boundary`].
    pub fn is_compliant(&self, model: &ModelSpec) -> bool {
        let support = model.support();
        let tau = model.tau();
        boundary_points(support).iter().all(|k| {
            let f = self.evaluate(k);
            if f == 0.0 {
                return true;
            }
            let t = tau.evaluate(k);
            (0..support.dim()).all(|i| support.lower()[i] != Bound::Finite(k[i]) || t[i] == 0.0)
        })
    }

    /// Resolves a test function by name for a setting. `masked_identity`,
    /// `sum_interior` and `default` take their masks from the setting's box.
    pub fn from_name(name: &str, setting: &Setting) -> Result<Vec<TestFunction>> {
        let single = |f: TestFunction| Ok(vec![f]);
        match name {
            "default" => Ok(default_test_functions(setting.family(), setting.support())),
            "zero" => single(TestFunction::Zero),
            "one" => single(TestFunction::One),
            "identity" => single(TestFunction::Identity),
            "log" => single(TestFunction::Log),
            "k_minus_1" => single(TestFunction::KMinus1),
            "inv_sum_interior" => single(TestFunction::InvSumInterior),
            "sum_interior" => single(TestFunction::SumInterior(setting.support().clone())),
            "masked_identity" => match setting.family() {
                Family::TruncPoisson | Family::TruncBinomial => {
                    Ok(default_test_functions(setting.family(), setting.support()))
                }
                f => Err(Error::Usage(format!("masked_identity is not defined for `{f}`"))),
            },
            _ => {
                // BNB pairs are written `f1+f2`.
                if let Some((a, b)) = name.split_once('+') {
                    let mut out = TestFunction::from_name(a.trim(), setting)?;
                    out.extend(TestFunction::from_name(b.trim(), setting)?);
                    return Ok(out);
                }
                Err(Error::Usage(format!("unknown test function `{name}`")))
            }
        }
    }
}

/// Points on the finite faces of `support`, with open axes cut to a window.
fn boundary_points(support: &LatticeBox) -> Vec<Vec<i64>> {
    const WINDOW: i64 = 25;
    let d = support.dim();
    let lo: Vec<i64> = (0..d)
        .map(|i| support.lower_finite(i).unwrap_or(-WINDOW))
        .collect();
    let hi: Vec<i64> = (0..d)
        .map(|i| support.upper_finite(i).unwrap_or(lo[i] + WINDOW))
        .collect();
    let Ok(window) = LatticeBox::new_allow_degenerate(
        lo.iter().copied().map(Bound::Finite).collect(),
        hi.iter().copied().map(Bound::Finite).collect(),
    ) else {
        return Vec::new();
    };
    let mut pts = Vec::new();
    let _ = window.for_each_point(|k| {
        if support.on_face(k) {
            pts.push(k.to_vec());
        }
    });
    pts
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::MaskedIdentity { zeros } => write!(f, "masked_identity{zeros:?}"),
            TestFunction::SumInterior(b) => write!(f, "sum_interior[{b}]"),
            other => f.write_str(other.name()),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The test functions used for each family in the simulation studies.
///
/// BNB takes two functions; every other family takes one.
pub fn default_test_functions(family: Family, support: &LatticeBox) -> Vec<TestFunction> {
    let a = support.lower_finite(0).unwrap_or(0);
    match family {
        Family::Poisson | Family::NegMultinomial => vec![TestFunction::One],
        Family::Binomial => vec![TestFunction::Identity],
        Family::YuleSimon => vec![TestFunction::Log],
        Family::BetaNegBinomial => vec![TestFunction::Identity, TestFunction::One],
        Family::Logarithmic => vec![TestFunction::KMinus1],
        Family::TruncPoisson => {
            let mut zeros = vec![a];
            zeros.extend(support.upper_finite(0));
            vec![TestFunction::MaskedIdentity { zeros }]
        }
        Family::TruncBinomial => {
            let b = support.upper_finite(0).expect("truncated binomial box is bounded");
            vec![TestFunction::MaskedIdentity { zeros: vec![a, b + 1] }]
        }
        Family::TruncNegMultinomial => vec![TestFunction::SumInterior(support.clone())],
        Family::DirichletNegMultinomial => vec![TestFunction::InvSumInterior],
    }
}
