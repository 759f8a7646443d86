//! Refitting the six-predictor models from labeled profiles.
//!
//! No predictor selection is performed: both models always use all six
//! standardized ratios. Zero out coefficients by hand for a sparser model.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::GeometryProfile;
use crate::selector::{Coefficients, ModelCoefficients};

pub const MAX_IRLS_ITERATIONS: usize = 100;
const MIN_RECORDS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRecord {
    pub profile: GeometryProfile,
    pub optimal: bool,
    pub z_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefitOutcome {
    pub coefficients: ModelCoefficients,
    /// The design matrix had rank < 7; the minimum-norm solution was used.
    pub rank_deficient: bool,
    pub irls_iterations: usize,
}

fn design(records: &[TrainingRecord]) -> Result<DMatrix<f64>> {
    let mut x = DMatrix::zeros(records.len(), 7);
    for (i, r) in records.iter().enumerate() {
        let z = r.profile.z.ok_or(Error::Unstandardized)?;
        x[(i, 0)] = 1.0;
        for j in 0..6 {
            x[(i, j + 1)] = z[j];
        }
    }
    Ok(x)
}

fn pinv_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, usize)> {
    let svd = a.clone().try_svd(true, true, f64::EPSILON, 0).ok_or(Error::Svd)?;
    let sigma_max = svd.singular_values.max();
    let cutoff = a.nrows().max(a.ncols()) as f64 * f64::EPSILON * sigma_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let solution = svd.solve(b, cutoff).map_err(|_| Error::Svd)?;
    Ok((solution, rank))
}

fn to_coefficients(beta: &DVector<f64>) -> Coefficients {
    let mut weights = [0.0; 6];
    weights.copy_from_slice(&beta.as_slice()[1..7]);
    Coefficients {
        intercept: beta[0],
        weights,
    }
}

/// Ordinary least squares of standardized accuracy on the z-scores.
pub fn fit_linear(records: &[TrainingRecord]) -> Result<(Coefficients, bool)> {
    let x = design(records)?;
    let y = DVector::from_iterator(records.len(), records.iter().map(|r| r.z_accuracy));
    let (beta, rank) = pinv_solve(&x, &y)?;
    Ok((to_coefficients(&beta), rank < 7))
}

/// Logistic regression by iteratively reweighted least squares.
pub fn fit_logistic(records: &[TrainingRecord]) -> Result<(Coefficients, bool, usize)> {
    let x = design(records)?;
    let y: Vec<f64> = records.iter().map(|r| if r.optimal { 1.0 } else { 0.0 }).collect();
    let n = records.len();
    let mut beta = DVector::zeros(7);
    for iter in 1..=MAX_IRLS_ITERATIONS {
        let eta = &x * &beta;
        let mut xtwx = DMatrix::zeros(7, 7);
        let mut xtwz = DVector::zeros(7);
        for i in 0..n {
            let p = 1.0 / (1.0 + (-eta[i]).exp());
            let w = (p * (1.0 - p)).max(1e-10);
            let working = eta[i] + (y[i] - p) / w;
            let row = x.row(i);
            for a in 0..7 {
                xtwz[a] += w * row[a] * working;
                for b in 0..7 {
                    xtwx[(a, b)] += w * row[a] * row[b];
                }
            }
        }
        let (next, rank) = pinv_solve(&xtwx, &xtwz)?;
        let rank_deficient = rank < 7;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence(iter));
        }
        let step = (&next - &beta).amax();
        beta = next;
        if step <= 1e-10 * (1.0 + beta.amax()) {
            return Ok((to_coefficients(&beta), rank_deficient, iter));
        }
    }
    Err(Error::NonConvergence(MAX_IRLS_ITERATIONS))
}

pub fn refit(records: &[TrainingRecord]) -> Result<RefitOutcome> {
    if records.len() < MIN_RECORDS {
        return Err(Error::InvalidParameter(format!(
            "refit needs at least {MIN_RECORDS} records, got {}",
            records.len()
        )));
    }
    let positives = records.iter().filter(|r| r.optimal).count();
    if positives == 0 || positives == records.len() {
        return Err(Error::SingleClass);
    }
    let (logistic, log_deficient, irls_iterations) = fit_logistic(records)?;
    let (linear, lin_deficient) = fit_linear(records)?;
    Ok(RefitOutcome {
        coefficients: ModelCoefficients { logistic, linear },
        rank_deficient: log_deficient || lin_deficient,
        irls_iterations,
    })
}
