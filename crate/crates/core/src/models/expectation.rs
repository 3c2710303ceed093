use crate::error::{Error, Result};

use super::pmf::PmfEval;
use super::ModelSpec;

/// Hard cap on the number of points visited along an infinite axis.
pub const TAIL_CAP_POINTS: usize = 1_000_000;
/// Hard cap on the total number of points visited on a multivariate support.
const TOTAL_CAP_POINTS: u64 = 50_000_000;
/// A point (or shell) is negligible once `pmf · max(1, |g|)` drops below this.
const TAIL_EPS: f64 = 1e-15;
/// Number of consecutive negligible points (or shells) that ends a tail.
const TAIL_RUN: usize = 30;

/// `Σ_{k∈U} g(k) p_θ(k)`.
///
/// Finite supports are summed exactly. Infinite axes are extended until
/// `pmf(k)·max(1, |g(k)|)` stays below 1e-15 for 30 consecutive points after
/// most of the mass has been seen; multivariate supports with infinite axes
/// are swept in shells of constant total offset from the lower corner, with
/// the same rule applied to whole shells.
pub fn exact_expectation<G>(model: &ModelSpec, mut g: G) -> Result<Vec<f64>>
where
    G: FnMut(&[i64]) -> Vec<f64>,
{
    let eval = PmfEval::new(model)?;
    let support = model.support();
    let mut acc = Accumulator::default();

    if support.is_bounded() {
        support.for_each_point(|k| {
            let w = eval.log_pmf_unchecked(k).exp();
            acc.add(w, &g(k));
        })?;
        return Ok(acc.finish());
    }

    let lower: Vec<i64> = (0..support.dim())
        .map(|i| {
            support
                .lower_finite(i)
                .ok_or_else(|| Error::Usage("expectations need finite lower bounds".into()))
        })
        .collect::<Result<_>>()?;

    if support.dim() == 1 {
        let mut run = 0;
        for offset in 0..TAIL_CAP_POINTS as i64 {
            let k = [lower[0] + offset];
            let w = eval.log_pmf_unchecked(&k).exp();
            let v = g(&k);
            acc.add(w, &v);
            if w * norm(&v).max(1.0) < TAIL_EPS {
                run += 1;
            } else {
                run = 0;
            }
            if run >= TAIL_RUN && acc.mass > 0.5 {
                return Ok(acc.finish());
            }
        }
        return Err(non_convergent(model));
    }

    let caps: Vec<Option<i64>> = (0..support.dim())
        .map(|i| support.upper_finite(i).map(|b| b - lower[i]))
        .collect();
    let mut run = 0;
    let mut visited: u64 = 0;
    let mut k = lower.clone();
    for total in 0..TAIL_CAP_POINTS as i64 {
        let mut shell = 0.0;
        let mut count: u64 = 0;
        for_each_composition(total, &caps, &lower, &mut k, 0, &mut |k| {
            let w = eval.log_pmf_unchecked(k).exp();
            let v = g(k);
            acc.add(w, &v);
            shell += w * norm(&v).max(1.0);
            count += 1;
        });
        visited += count;
        if visited > TOTAL_CAP_POINTS {
            return Err(non_convergent(model));
        }
        if shell < TAIL_EPS {
            run += 1;
        } else {
            run = 0;
        }
        if run >= TAIL_RUN && acc.mass > 0.5 {
            return Ok(acc.finish());
        }
    }
    Err(non_convergent(model))
}

fn non_convergent(model: &ModelSpec) -> Error {
    Error::Numerical(format!(
        "tail sum for `{}` did not converge within the point cap",
        model.family()
    ))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Visits every point `lower + j` with `Σ j = total`, `0 <= j_i <= caps_i`.
fn for_each_composition(
    total: i64,
    caps: &[Option<i64>],
    lower: &[i64],
    k: &mut [i64],
    axis: usize,
    visit: &mut dyn FnMut(&[i64]),
) {
    let d = caps.len();
    if axis == d - 1 {
        if caps[axis].is_none_or(|c| total <= c) {
            k[axis] = lower[axis] + total;
            visit(k);
        }
        return;
    }
    // Remaining axes must be able to absorb what this one leaves over.
    let rest_cap: Option<i64> = caps[axis + 1..]
        .iter()
        .try_fold(0i64, |s, c| c.map(|c| s + c));
    let hi = caps[axis].map_or(total, |c| c.min(total));
    let lo = rest_cap.map_or(0, |r| (total - r).max(0));
    for j in lo..=hi {
        k[axis] = lower[axis] + j;
        for_each_composition(total - j, caps, lower, k, axis + 1, visit);
    }
}

/// Componentwise Neumaier summation of `w · v`, plus the total weight.
#[derive(Default)]
struct Accumulator {
    sum: Vec<f64>,
    comp: Vec<f64>,
    mass: f64,
}

impl Accumulator {
    fn add(&mut self, w: f64, v: &[f64]) {
        if self.sum.is_empty() {
            self.sum = vec![0.0; v.len()];
            self.comp = vec![0.0; v.len()];
        }
        self.mass += w;
        if w == 0.0 {
            return;
        }
        for ((s, c), &x) in self.sum.iter_mut().zip(&mut self.comp).zip(v) {
            let term = w * x;
            let t = *s + term;
            if s.abs() >= term.abs() {
                *c += (*s - t) + term;
            } else {
                *c += (term - t) + *s;
            }
            *s = t;
        }
    }

    fn finish(self) -> Vec<f64> {
        self.sum.iter().zip(&self.comp).map(|(s, c)| s + c).collect()
    }
}
