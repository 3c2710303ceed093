use std::f64::consts::E;

use crate::error::{Error, Result};

const BRANCH_POINT: f64 = -1.0 / E;

/// Lower real branch `W_{-1}(x)` of the Lambert W function on `[-1/e, 0)`.
///
/// Returns the solution `w <= -1` of `w e^w = x`. The initial guess comes from
/// the branch-point series near `-1/e` and from the logarithmic asymptote near
/// zero; Halley's iteration then polishes it.
pub fn lambert_w_minus1(x: f64) -> Result<f64> {
    if !(BRANCH_POINT..0.0).contains(&x) {
        // -1/e itself is not exactly representable; accept values rounding to it.
        if (x - BRANCH_POINT).abs() <= 4.0 * f64::EPSILON * -BRANCH_POINT {
            return Ok(-1.0);
        }
        return Err(Error::Domain(format!("W_-1 is defined on [-1/e, 0), got {x}")));
    }
    if x == BRANCH_POINT {
        return Ok(-1.0);
    }

    let mut w = initial_guess(x);
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        let next = (w - step).min(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}

fn initial_guess(x: f64) -> f64 {
    // Distance from the branch point; p -> 0 as x -> -1/e.
    let p = -(2.0 * (E * x + 1.0)).max(0.0).sqrt();
    if x < -0.25 {
        // Branch-point series in p (taking the negative root selects W_-1).
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    }
}
