//! Numerical rank, affine hull dimension, and affine hull membership.
//!
//! Every rank decision goes through [`numerical_rank`], so affine dimension
//! and membership share one tolerance regime. [`exact_rank`] is the
//! exact-arithmetic reference used to check the floating-point path.

use nalgebra::{DMatrix, SVD};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TolerancePolicy {
    /// Threshold `max(rows, cols) * epsilon * sigma_max`.
    Relative,
    /// Threshold `epsilon`.
    Absolute,
}

/// Cut-off below which singular values count as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTolerance {
    policy: TolerancePolicy,
    epsilon: f64,
}

impl RankTolerance {
    pub fn new(policy: TolerancePolicy, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be finite and positive, got {epsilon}"
            )));
        }
        Ok(Self { policy, epsilon })
    }

    pub fn relative(epsilon: f64) -> Result<Self> {
        Self::new(TolerancePolicy::Relative, epsilon)
    }

    pub fn absolute(epsilon: f64) -> Result<Self> {
        Self::new(TolerancePolicy::Absolute, epsilon)
    }

    pub fn policy(&self) -> TolerancePolicy {
        self.policy
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self.policy {
            TolerancePolicy::Relative => rows.max(cols) as f64 * self.epsilon * sigma_max,
            TolerancePolicy::Absolute => self.epsilon,
        }
    }
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self {
            policy: TolerancePolicy::Relative,
            epsilon: f64::EPSILON,
        }
    }
}

pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, 0).ok_or(Error::Svd)?;
    Ok(svd.singular_values.iter().copied().collect())
}

pub fn numerical_rank(m: &DMatrix<f64>, tol: RankTolerance) -> Result<usize> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    let sv = singular_values(m)?;
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Ok(0);
    }
    let threshold = tol.threshold(m.nrows(), m.ncols(), sigma_max);
    Ok(sv.iter().filter(|&&s| s > threshold).count())
}

/// Exact rank over the rationals by fraction-free (Bareiss) elimination.
pub fn exact_rank(rows: &[Vec<i64>]) -> usize {
    let n_rows = rows.len();
    let n_cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            (0..n_cols)
                .map(|j| BigInt::from(r.get(j).copied().unwrap_or(0)))
                .collect()
        })
        .collect();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(p) = (rank..n_rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..n_rows {
            for c in col + 1..n_cols {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].abs();
        rank += 1;
    }
    rank
}

fn check_points<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyPointSet)?;
    let n = first.as_ref().len();
    for p in points {
        let p = p.as_ref();
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point"));
        }
    }
    Ok(n)
}

/// Affine hull of a point set, kept as the difference matrix
/// `(v_1 - v_d, ..., v_{d-1} - v_d)` anchored at the last point.
#[derive(Debug, Clone)]
pub struct AffineHull {
    anchor: Vec<f64>,
    differences: DMatrix<f64>,
    dim: usize,
    tol: RankTolerance,
}

impl AffineHull {
    pub fn new<P: AsRef<[f64]>>(points: &[P], tol: RankTolerance) -> Result<Self> {
        let n = check_points(points)?;
        let (anchor, rest) = points.split_last().expect("nonempty");
        let anchor = anchor.as_ref().to_vec();
        let differences = DMatrix::from_fn(n, rest.len(), |i, j| rest[j].as_ref()[i] - anchor[i]);
        let dim = numerical_rank(&differences, tol)?;
        Ok(Self {
            anchor,
            differences,
            dim,
            tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_len(&self) -> usize {
        self.anchor.len()
    }

    /// True when appending `x - anchor` does not raise the rank.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.anchor.len() {
            return Err(Error::DimensionMismatch {
                expected: self.anchor.len(),
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point"));
        }
        let k = self.differences.ncols();
        let mut augmented = self.differences.clone().insert_column(k, 0.0);
        for (i, (xi, ai)) in x.iter().zip(&self.anchor).enumerate() {
            augmented[(i, k)] = xi - ai;
        }
        Ok(numerical_rank(&augmented, self.tol)? == self.dim)
    }
}

pub fn affine_dimension<P: AsRef<[f64]>>(points: &[P], tol: RankTolerance) -> Result<usize> {
    Ok(AffineHull::new(points, tol)?.dim())
}

pub fn in_affine_hull<P: AsRef<[f64]>>(x: &[f64], points: &[P], tol: RankTolerance) -> Result<bool> {
    AffineHull::new(points, tol)?.contains(x)
}

/// Number of coordinates that are nonzero in at least one point.
pub fn ambient_dimension<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    let n = check_points(points)?;
    Ok((0..n).filter(|&j| points.iter().any(|p| p.as_ref()[j] != 0.0)).count())
}
