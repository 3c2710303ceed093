use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// Stirling series coefficients B_{2j} / (2j (2j - 1)), j = 1..9.
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
];

/// Below this the argument is shifted up by the recurrence before the
/// asymptotic series is applied.
const SHIFT_THRESHOLD: f64 = 10.0;

/// `ln Γ(x)` for `x > 0`.
///
/// Stirling's series with nine correction terms, after lifting small
/// arguments above 10 with `Γ(x+1) = xΓ(x)`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma needs a finite x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

/// [`log_gamma`] without the argument check; callers guarantee `x > 0`.
pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let mut z = x;
    let mut shift = 1.0;
    while z < SHIFT_THRESHOLD {
        shift *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    let stirling = (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series;
    stirling - shift.ln()
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

pub(crate) fn log_beta_unchecked(a: f64, b: f64) -> f64 {
    log_gamma_unchecked(a) + log_gamma_unchecked(b) - log_gamma_unchecked(a + b)
}

/// `ln k!` for non-negative integers.
pub fn log_factorial(k: i64) -> f64 {
    debug_assert!(k >= 0);
    if k < 2 {
        0.0
    } else {
        log_gamma_unchecked(k as f64 + 1.0)
    }
}

/// `ln C(m, k)`.
pub fn log_choose(m: u64, k: u64) -> f64 {
    debug_assert!(k <= m);
    log_factorial(m as i64) - log_factorial(k as i64) - log_factorial((m - k) as i64)
}

/// Numerically stable `ln Σ exp(v_i)`; `-inf` for an empty input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `-p - ln(1 - p)` without cancellation for small `p`.
pub(crate) fn neg_p_minus_log1m(p: f64) -> f64 {
    if p < 0.05 {
        // Σ_{j≥2} p^j / j
        let mut term = p * p;
        let mut sum = 0.0;
        for j in 2..60 {
            let t = term / j as f64;
            sum += t;
            if t < sum * 1e-17 {
                break;
            }
            term *= p;
        }
        sum
    } else {
        -p - (-p).ln_1p()
    }
}
