//! Lattice geometry: per-axis bounds, rectangular boxes in Z^d and samples.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One end of an axis of a lattice box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    Finite(i64),
    PlusInfinity,
    MinusInfinity,
}

impl Bound {
    pub fn finite(self) -> Option<i64> {
        match self {
            Bound::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::PlusInfinity => f.write_str("inf"),
            Bound::MinusInfinity => f.write_str("-inf"),
        }
    }
}

/// Rectangular support `{a_1..b_1} x ... x {a_d..b_d}`.
///
/// Construction enforces `a_i < b_i` on every axis. The domain estimator can
/// legitimately produce an axis with `a_i = b_i`; that case goes through
/// [`LatticeBox::new_allow_degenerate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    lower: Vec<Bound>,
    upper: Vec<Bound>,
}

impl LatticeBox {
    pub fn new(lower: Vec<Bound>, upper: Vec<Bound>) -> Result<Self> {
        let b = Self::new_allow_degenerate(lower, upper)?;
        for i in 0..b.dim() {
            if let (Bound::Finite(a), Bound::Finite(u)) = (b.lower[i], b.upper[i]) {
                if a >= u {
                    return Err(Error::InvalidModel(format!(
                        "axis {i}: lower bound {a} must be below upper bound {u}"
                    )));
                }
            }
        }
        Ok(b)
    }

    pub fn new_allow_degenerate(lower: Vec<Bound>, upper: Vec<Bound>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidModel(format!(
                "box needs matching non-empty bound lists, got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (&a, &b)) in lower.iter().zip(&upper).enumerate() {
            if a == Bound::PlusInfinity {
                return Err(Error::InvalidModel(format!("axis {i}: +inf used as a lower bound")));
            }
            if b == Bound::MinusInfinity {
                return Err(Error::InvalidModel(format!("axis {i}: -inf used as an upper bound")));
            }
            if let (Bound::Finite(a), Bound::Finite(b)) = (a, b) {
                if a > b {
                    return Err(Error::InvalidModel(format!(
                        "axis {i}: lower bound {a} exceeds upper bound {b}"
                    )));
                }
            }
        }
        Ok(Self { lower, upper })
    }

    /// `{lo..hi}` on a single axis; `hi = None` means +infinity.
    pub fn interval(lo: i64, hi: Option<i64>) -> Result<Self> {
        Self::new(
            vec![Bound::Finite(lo)],
            vec![hi.map_or(Bound::PlusInfinity, Bound::Finite)],
        )
    }

    /// `{lo_1..hi_1} x ...` with every bound finite.
    pub fn finite(lo: &[i64], hi: &[i64]) -> Result<Self> {
        Self::new(
            lo.iter().copied().map(Bound::Finite).collect(),
            hi.iter().copied().map(Bound::Finite).collect(),
        )
    }

    /// The non-negative orthant `N_0^d` shifted to start at `lo` on every axis.
    pub fn orthant(d: usize, lo: i64) -> Self {
        Self {
            lower: vec![Bound::Finite(lo); d],
            upper: vec![Bound::PlusInfinity; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[Bound] {
        &self.lower
    }

    pub fn upper(&self) -> &[Bound] {
        &self.upper
    }

    pub fn lower_finite(&self, axis: usize) -> Option<i64> {
        self.lower[axis].finite()
    }

    pub fn upper_finite(&self, axis: usize) -> Option<i64> {
        self.upper[axis].finite()
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|b| b.is_finite())
    }

    /// True if some axis has `a_i = b_i`.
    pub fn is_degenerate(&self) -> bool {
        self.lower
            .iter()
            .zip(&self.upper)
            .any(|(a, b)| a.is_finite() && a == b)
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.len() == self.dim()
            && k.iter().enumerate().all(|(i, &v)| {
                let above = match self.lower[i] {
                    Bound::Finite(a) => v >= a,
                    Bound::MinusInfinity => true,
                    Bound::PlusInfinity => false,
                };
                let below = match self.upper[i] {
                    Bound::Finite(b) => v <= b,
                    Bound::PlusInfinity => true,
                    Bound::MinusInfinity => false,
                };
                above && below
            })
    }

    /// True if `k` sits on a finite face (`k_i = a_i` or `k_i = b_i`).
    pub fn on_face(&self, k: &[i64]) -> bool {
        k.iter().enumerate().any(|(i, &v)| {
            self.lower[i] == Bound::Finite(v) || self.upper[i] == Bound::Finite(v)
        })
    }

    /// Number of lattice points, if finite and representable.
    pub fn cardinality(&self) -> Option<u64> {
        let mut n: u64 = 1;
        for i in 0..self.dim() {
            let (a, b) = (self.lower_finite(i)?, self.upper_finite(i)?);
            n = n.checked_mul(u64::try_from(b - a + 1).ok()?)?;
        }
        Some(n)
    }

    /// Visits every point of a bounded box in lexicographic order.
    pub fn for_each_point(&self, mut visit: impl FnMut(&[i64])) -> Result<()> {
        if !self.is_bounded() {
            return Err(Error::Usage("cannot enumerate an unbounded box".into()));
        }
        let lo: Vec<i64> = (0..self.dim()).map(|i| self.lower_finite(i).unwrap()).collect();
        let hi: Vec<i64> = (0..self.dim()).map(|i| self.upper_finite(i).unwrap()).collect();
        let mut k = lo.clone();
        loop {
            visit(&k);
            let mut axis = self.dim();
            loop {
                if axis == 0 {
                    return Ok(());
                }
                axis -= 1;
                if k[axis] < hi[axis] {
                    k[axis] += 1;
                    break;
                }
                k[axis] = lo[axis];
            }
        }
    }
}

impl fmt::Display for LatticeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "{{{}..{}}}", self.lower[i], self.upper[i])?;
        }
        Ok(())
    }
}

/// An `n x d` matrix of integer observations, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    dim: usize,
    data: Vec<i64>,
}

impl Sample {
    pub fn new(dim: usize, data: Vec<i64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::Usage(format!(
                "sample data of length {} does not split into rows of width {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn univariate(values: Vec<i64>) -> Self {
        Self { dim: 1, data: values }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.first().map_or(1, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Usage("rows of unequal width".into()));
        }
        Self::new(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[i64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn push(&mut self, row: &[i64]) {
        assert_eq!(row.len(), self.dim, "row width mismatch");
        self.data.extend_from_slice(row);
    }

    /// Column `axis` as floats.
    pub fn column(&self, axis: usize) -> impl Iterator<Item = i64> + '_ {
        self.rows().map(move |r| r[axis])
    }

    pub fn column_means(&self) -> Vec<f64> {
        let n = self.len() as f64;
        (0..self.dim)
            .map(|i| self.column(i).map(|v| v as f64).sum::<f64>() / n)
            .collect()
    }
}
