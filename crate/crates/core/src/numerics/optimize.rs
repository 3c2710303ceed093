//! Derivative-free optimizers: Nelder–Mead for several variables and Brent's
//! method for one.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration and wall-clock limits for one optimizer call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_iters: usize,
    pub max_seconds: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            max_seconds: 10.0,
        }
    }
}

/// Why an optimizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Converged,
    IterationCap,
    TimeExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerReport {
    pub argmin: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
    pub elapsed: Duration,
}

/// Nelder–Mead settings. The simplex is declared converged once its
/// diameter and its objective spread are both below their thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexTolerances {
    pub diameter: f64,
    pub spread: f64,
    /// Edge length of the initial simplex along each axis. `None` uses 5% of
    /// each coordinate, or 0.00025 for coordinates within 1e-3 of zero.
    pub initial_step: Option<f64>,
}

impl Default for SimplexTolerances {
    fn default() -> Self {
        Self {
            diameter: 1e-8,
            spread: 1e-10,
            initial_step: None,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `objective` with the Nelder–Mead simplex method, starting
/// from a simplex built around `start`.
///
/// Non-finite objective values away from the start are treated as `+inf`
/// so the simplex retreats from them.
pub fn nelder_mead<F>(mut objective: F, start: &[f64], budget: Budget) -> Result<OptimizerReport>
where
    F: FnMut(&[f64]) -> f64,
{
    nelder_mead_with(&mut objective, start, budget, SimplexTolerances::default())
}

pub fn nelder_mead_with<F>(
    objective: &mut F,
    start: &[f64],
    budget: Budget,
    tol: SimplexTolerances,
) -> Result<OptimizerReport>
where
    F: FnMut(&[f64]) -> f64,
{
    let clock = Instant::now();
    let n = start.len();
    if n == 0 {
        return Err(Error::Usage("nelder_mead needs at least one variable".into()));
    }
    let f0 = objective(start);
    if !f0.is_finite() {
        return Err(Error::Numerical(format!(
            "objective is not finite at the starting point ({f0})"
        )));
    }
    let mut eval = |x: &[f64]| {
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    values.push(f0);
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += match tol.initial_step {
            Some(h) => h,
            None if v[i].abs() > 1e-3 => 0.05 * v[i],
            None => 0.00025,
        };
        values.push(eval(&v));
        simplex.push(v);
    }

    let mut iterations = 0;
    let stop = loop {
        order(&mut simplex, &mut values);
        if diameter(&simplex) < tol.diameter && values[n] - values[0] < tol.spread {
            break StopReason::Converged;
        }
        if iterations >= budget.max_iters {
            break StopReason::IterationCap;
        }
        if clock.elapsed().as_secs_f64() > budget.max_seconds {
            break StopReason::TimeExceeded;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(REFLECT);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(REFLECT * EXPAND);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < values[n] {
            let xc = along(REFLECT * CONTRACT);
            let fc = eval(&xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = along(-CONTRACT);
            let fc = eval(&xc);
            (xc, fc, fc < values[n])
        };
        if accept {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            for j in 0..n {
                simplex[i][j] = best[j] + SHRINK * (simplex[i][j] - best[j]);
            }
            values[i] = eval(&simplex[i]);
        }
    };
    order(&mut simplex, &mut values);
    Ok(OptimizerReport {
        argmin: simplex.swap_remove(0),
        objective_value: values[0],
        iterations,
        converged: stop == StopReason::Converged,
        stop,
        elapsed: clock.elapsed(),
    })
}

// Stable, so ties keep their current order and the start stays in front.
fn order(simplex: &mut Vec<Vec<f64>>, values: &mut Vec<f64>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    *simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
    *values = idx.iter().map(|&i| values[i]).collect();
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in simplex.iter().enumerate() {
        for b in &simplex[i + 1..] {
            let dist = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            d = d.max(dist);
        }
    }
    d
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Brent's minimizer (golden section with parabolic steps) on `[lo, hi]`.
///
/// Returns a local minimizer accurate to about `tol`.
pub fn minimize_1d<F>(mut objective: F, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = bracket;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Usage(format!("invalid bracket [{a}, {b}]")));
    }
    let mut checked = |x: f64| -> Result<f64> {
        let v = objective(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numerical(format!("objective is {v} at {x}")))
        }
    };

    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = checked(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..500 {
        let m = 0.5 * (a + b);
        let tol1 = 1e-12 * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(x);
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = checked(u)?;
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::Numerical("Brent iteration did not converge".into()))
}

/// Outcome of a geometric bracket search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bracket {
    /// `(lo, hi)` with an interior point lower than both ends.
    Found(f64, f64),
    /// The search walked off `limit` in the given direction.
    HitLimit(f64),
}

/// Expands a bracket around `start` geometrically until the objective rises
/// on both sides, or gives up once the centre leaves `[-limit, limit]`.
pub fn expand_bracket<F>(mut objective: F, start: f64, limit: f64) -> Result<Bracket>
where
    F: FnMut(f64) -> f64,
{
    let mut eval = |x: f64| -> Result<f64> {
        let v = objective(x);
        if v.is_nan() {
            Err(Error::Numerical(format!("objective is NaN at {x}")))
        } else {
            Ok(v)
        }
    };
    let mut centre = start;
    let mut fc = eval(centre)?;
    let mut step = 1.0;
    loop {
        let (lo, hi) = (centre - step, centre + step);
        let (flo, fhi) = (eval(lo)?, eval(hi)?);
        if flo >= fc && fhi >= fc {
            return Ok(Bracket::Found(lo, hi));
        }
        if flo < fhi {
            centre = lo;
            fc = flo;
        } else {
            centre = hi;
            fc = fhi;
        }
        if centre.abs() > limit {
            return Ok(Bracket::HitLimit(centre));
        }
        step *= 1.6;
    }
}
