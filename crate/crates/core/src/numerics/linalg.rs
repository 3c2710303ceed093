use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Condition numbers above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// 2-norm condition number from the singular values; `inf` when singular.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    if a.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let sv = a.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `a x = b`, refusing systems whose condition number exceeds
/// [`MAX_CONDITION`].
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if !a.is_square() || a.nrows() != b.len() {
        return Err(Error::Usage(format!(
            "cannot solve a {}x{} system with a right-hand side of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let cond = condition_number(a);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Numerical(format!("singular system (condition number {cond:e})")));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Numerical("LU solve failed".into()))
}

pub fn invert(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let cond = condition_number(a);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Numerical(format!("singular matrix (condition number {cond:e})")));
    }
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("matrix inversion failed".into()))
}
