use rand::Rng;
use rand_distr::{Beta, Distribution, Exp, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Sample};
use crate::numerics::{log_factorial, log_sum_exp};
use crate::rng::seeded_rng;

use super::pmf::{binomial_log_pmf, PmfEval};
use super::{Family, ModelSpec};

/// Draws are clamped here so that later integer arithmetic cannot overflow.
/// Reaching it requires a parameter draw in a region of probability far
/// below anything a simulation can observe.
const MAX_COUNT: f64 = 9_007_199_254_740_992.0; // 2^53

/// Below this acceptance rate, truncated families switch from rejection to
/// table inversion.
const MIN_ACCEPTANCE: f64 = 0.05;

/// Poisson means above this use PTRS instead of sequential inversion.
const POISSON_INVERSION_MAX: f64 = 30.0;

/// Binomial trial counts up to this are drawn as Bernoulli sums.
const BERNOULLI_SUM_MAX: u64 = 64;

/// Beyond this variance the chop-down inversion would take millions of
/// steps; a rounded normal draw is used instead.
const BINOMIAL_NORMAL_VARIANCE: f64 = 1e12;

/// `n` i.i.d. draws from `model`, fully determined by `seed`.
pub fn sample(model: &ModelSpec, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::Usage("sample size must be at least 1".into()));
    }
    let sampler = Sampler::new(model)?;
    Ok(sampler.sample(n, &mut seeded_rng(seed)))
}

/// A prepared sampler; construction does all per-model setup (truncation
/// mass, inversion tables, distribution objects).
#[derive(Debug, Clone)]
pub struct Sampler {
    dim: usize,
    strategy: Strategy,
}

#[derive(Debug, Clone)]
enum Strategy {
    Direct(Draw),
    Rejection(Draw, LatticeBox),
    Table { points: Vec<i64>, cdf: Vec<f64> },
}

#[derive(Debug, Clone)]
enum Draw {
    Poisson(f64),
    Binomial(u64, f64),
    YuleSimon(Exp<f64>),
    BetaNegBinomial { mix: Beta<f64>, gamma_r: Gamma<f64> },
    Logarithmic(f64),
    NegMultinomial { gamma_r: Gamma<f64>, odds: f64, weights: Vec<f64> },
    DirichletNegMultinomial { gamma_r: Gamma<f64>, gamma0: Gamma<f64>, gammas: Vec<Gamma<f64>> },
}

fn gamma(shape: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0).map_err(|e| Error::InvalidModel(format!("gamma shape {shape}: {e}")))
}

impl Sampler {
    pub fn new(model: &ModelSpec) -> Result<Self> {
        let th = model.theta();
        let s = model.setting();
        let parent = match model.family() {
            Family::Poisson | Family::TruncPoisson => Draw::Poisson(th[0]),
            Family::Binomial | Family::TruncBinomial => Draw::Binomial(s.m(), th[0]),
            Family::YuleSimon => Draw::YuleSimon(
                Exp::new(th[0]).map_err(|e| Error::InvalidModel(e.to_string()))?,
            ),
            Family::BetaNegBinomial => Draw::BetaNegBinomial {
                mix: Beta::new(th[0], th[1]).map_err(|e| Error::InvalidModel(e.to_string()))?,
                gamma_r: gamma(s.r())?,
            },
            Family::Logarithmic => Draw::Logarithmic(th[0]),
            Family::NegMultinomial | Family::TruncNegMultinomial => {
                let total: f64 = th.iter().sum();
                let p0 = 1.0 - total;
                Draw::NegMultinomial {
                    gamma_r: gamma(s.r())?,
                    odds: total / p0,
                    weights: th.iter().map(|p| p / total).collect(),
                }
            }
            Family::DirichletNegMultinomial => Draw::DirichletNegMultinomial {
                gamma_r: gamma(s.r())?,
                gamma0: gamma(s.alpha0())?,
                gammas: th.iter().map(|&a| gamma(a)).collect::<Result<_>>()?,
            },
        };
        let strategy = if model.family().is_truncated() {
            let eval = PmfEval::new(model)?;
            if eval.log_truncated_mass().exp() >= MIN_ACCEPTANCE {
                Strategy::Rejection(parent, model.support().clone())
            } else {
                build_table(&eval)?
            }
        } else {
            Strategy::Direct(parent)
        };
        Ok(Self {
            dim: model.dim(),
            strategy,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One draw written into `out` (length `dim`).
    pub fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [i64]) {
        match &self.strategy {
            Strategy::Direct(d) => d.draw(rng, out),
            Strategy::Rejection(d, support) => loop {
                d.draw(rng, out);
                if support.contains(out) {
                    return;
                }
            },
            Strategy::Table { points, cdf } => {
                let total = *cdf.last().expect("non-empty table");
                let u = rng.random::<f64>() * total;
                let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                out.copy_from_slice(&points[idx * self.dim..(idx + 1) * self.dim]);
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Sample {
        let mut data = vec![0i64; n * self.dim];
        for row in data.chunks_exact_mut(self.dim) {
            self.draw_into(rng, row);
        }
        Sample::new(self.dim, data).expect("row width matches")
    }
}

/// Inversion table over the support, tail-truncated for an open upper bound.
fn build_table(eval: &PmfEval) -> Result<Strategy> {
    let model = eval.model();
    let support = model.support();
    let mut points = Vec::new();
    let mut logs = Vec::new();
    if support.is_bounded() {
        support.for_each_point(|k| {
            points.extend_from_slice(k);
            logs.push(eval.log_pmf_unchecked(k));
        })?;
    } else {
        let lambda = model.theta()[0];
        let mut k = support.lower_finite(0).expect("validated lower bound");
        let mut running = f64::NEG_INFINITY;
        loop {
            let lp = eval.log_pmf_unchecked(&[k]);
            points.push(k);
            logs.push(lp);
            running = log_sum_exp(&[running, lp]);
            if k as f64 > lambda && lp < running - 40.0 {
                break;
            }
            if logs.len() > 1_000_000 {
                return Err(Error::Numerical("inversion table did not converge".into()));
            }
            k += 1;
        }
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = 0.0;
    let cdf = logs
        .iter()
        .map(|lp| {
            acc += (lp - max).exp();
            acc
        })
        .collect();
    Ok(Strategy::Table { points, cdf })
}

impl Draw {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [i64]) {
        match self {
            Draw::Poisson(lambda) => out[0] = poisson(rng, *lambda),
            Draw::Binomial(m, p) => out[0] = binomial(rng, *m, *p) as i64,
            Draw::YuleSimon(exp) => {
                let w = exp.sample(rng);
                out[0] = geometric_from_one(rng, w);
            }
            Draw::BetaNegBinomial { mix, gamma_r } => {
                let p: f64 = mix.sample(rng);
                // NB(r, p) = Poisson(Gamma(r, (1-p)/p))
                let lambda = gamma_r.sample(rng) * (1.0 - p) / p;
                out[0] = poisson(rng, lambda);
            }
            Draw::Logarithmic(p) => out[0] = logarithmic(rng, *p),
            Draw::NegMultinomial { gamma_r, odds, weights } => {
                let lambda = gamma_r.sample(rng) * odds;
                let total = poisson(rng, lambda);
                split(rng, total, weights, out);
            }
            Draw::DirichletNegMultinomial { gamma_r, gamma0, gammas } => loop {
                let g0 = gamma0.sample(rng);
                let g: Vec<f64> = gammas.iter().map(|d| d.sample(rng)).collect();
                let rest: f64 = g.iter().sum();
                if g0 <= 0.0 || rest <= 0.0 {
                    continue;
                }
                // p0 = g0 / (g0 + rest), so (1 - p0) / p0 = rest / g0
                let lambda = gamma_r.sample(rng) * (rest / g0);
                let total = poisson(rng, lambda);
                let weights: Vec<f64> = g.iter().map(|x| x / rest).collect();
                split(rng, total, &weights, out);
                return;
            },
        }
    }
}

fn clamp_count(x: f64) -> i64 {
    x.clamp(0.0, MAX_COUNT) as i64
}

/// Multinomial split of `total` by sequential conditional binomials.
fn split<R: Rng + ?Sized>(rng: &mut R, total: i64, weights: &[f64], out: &mut [i64]) {
    let mut remaining = total as u64;
    let mut mass = 1.0;
    let last = weights.len() - 1;
    for (i, &w) in weights.iter().enumerate() {
        if i == last {
            out[i] = remaining as i64;
            break;
        }
        let x = if mass > 0.0 {
            binomial(rng, remaining, (w / mass).clamp(0.0, 1.0))
        } else {
            0
        };
        out[i] = x as i64;
        remaining -= x;
        mass -= w;
    }
}

fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // (0, 1]
    1.0 - rng.random::<f64>()
}

pub(crate) fn poisson<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> i64 {
    if !(lambda > 0.0) {
        return 0;
    }
    if lambda <= POISSON_INVERSION_MAX {
        let u = rng.random::<f64>();
        let mut k = 0i64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        let cap = (lambda + 40.0 * lambda.sqrt() + 40.0) as i64;
        while u > cdf && k < cap {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
        }
        return k;
    }
    ptrs(rng, lambda)
}

/// Hörmann's transformed rejection with squeeze for large means.
fn ptrs<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> i64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let invalpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v = rng.random::<f64>();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return clamp_count(k);
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + invalpha.ln() - (a / (us * us) + b).ln();
        let rhs = -lambda + k * loglam - log_factorial_f(k);
        if lhs <= rhs {
            return clamp_count(k);
        }
    }
}

fn log_factorial_f(k: f64) -> f64 {
    if k < MAX_COUNT {
        log_factorial(k as i64)
    } else {
        crate::numerics::log_gamma_unchecked(k + 1.0)
    }
}

pub(crate) fn binomial<R: Rng + ?Sized>(rng: &mut R, m: u64, p: f64) -> u64 {
    if m == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return m;
    }
    if p > 0.5 {
        return m - binomial(rng, m, 1.0 - p);
    }
    if m <= BERNOULLI_SUM_MAX {
        return (0..m).filter(|_| rng.random::<f64>() < p).count() as u64;
    }
    let q = 1.0 - p;
    let mf = m as f64;
    let var = mf * p * q;
    if var > BINOMIAL_NORMAL_VARIANCE {
        let z: f64 = rng.sample(StandardNormal);
        return (mf * p + var.sqrt() * z).round().clamp(0.0, mf) as u64;
    }
    chop_down(rng, m, p)
}

/// Inversion that walks outward from the mode, alternating sides.
fn chop_down<R: Rng + ?Sized>(rng: &mut R, m: u64, p: f64) -> u64 {
    let q = 1.0 - p;
    let mode = (((m + 1) as f64) * p).floor().min(m as f64) as u64;
    let p_mode = binomial_log_pmf(m, p, mode as i64).exp();
    let mut u = rng.random::<f64>() - p_mode;
    if u <= 0.0 {
        return mode;
    }
    let (mut lo, mut hi) = (mode, mode);
    let (mut p_lo, mut p_hi) = (p_mode, p_mode);
    loop {
        let mut moved = false;
        if hi < m {
            p_hi *= (m - hi) as f64 / (hi + 1) as f64 * p / q;
            hi += 1;
            u -= p_hi;
            if u <= 0.0 {
                return hi;
            }
            moved = p_hi > 0.0;
        }
        if lo > 0 {
            p_lo *= lo as f64 / (m - lo + 1) as f64 * q / p;
            lo -= 1;
            u -= p_lo;
            if u <= 0.0 {
                return lo;
            }
            moved |= p_lo > 0.0;
        }
        if !moved {
            // Residual rounding mass.
            return mode;
        }
    }
}

/// Geometric on `{1, 2, …}` with success probability `e^{-w}`.
fn geometric_from_one<R: Rng + ?Sized>(rng: &mut R, w: f64) -> i64 {
    let log_fail = (-(-w).exp_m1()).ln();
    let k = 1.0 + (open_unit(rng).ln() / log_fail).floor();
    if k.is_nan() {
        return 1;
    }
    clamp_count(k).max(1)
}

fn logarithmic<R: Rng + ?Sized>(rng: &mut R, p: f64) -> i64 {
    let u = rng.random::<f64>();
    let mut prob = p / -(-p).ln_1p();
    let mut cdf = prob;
    let mut k = 1i64;
    while u > cdf {
        prob *= p * k as f64 / (k + 1) as f64;
        if prob == 0.0 {
            break;
        }
        k += 1;
        cdf += prob;
    }
    k
}
