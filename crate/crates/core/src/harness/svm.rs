//! Soft-margin linear SVM trained by dual coordinate descent.
//!
//! Hinge loss with penalty `C`; the bias is learned as the weight of an
//! implicit constant feature equal to 1, so it is regularized together with
//! the weights. Each epoch visits every dual variable once in a seeded random
//! order and minimizes the dual exactly along that coordinate, which keeps
//! the dual objective non-decreasing.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataio::SparseRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub max_epochs: usize,
    /// Stop once no projected gradient exceeds this in magnitude.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            max_epochs: 1000,
            tolerance: 1e-4,
            seed: 0,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParameter(format!("C must be positive, got {}", self.c)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidParameter("max_epochs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub params: SvmParams,
    pub epochs: usize,
    pub converged: bool,
    /// Dual objective after each epoch.
    pub dual_objective: Vec<f64>,
}

impl LinearModel {
    pub fn decision(&self, row: &SparseRow) -> f64 {
        row.iter()
            .filter(|&(c, _)| c < self.weights.len())
            .map(|(c, v)| v * self.weights[c])
            .sum::<f64>()
            + self.bias
    }

    /// +1 or -1; a point exactly on the boundary is assigned +1.
    pub fn predict(&self, row: &SparseRow) -> f64 {
        if self.decision(row) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn accuracy(&self, rows: &[SparseRow], targets: &[f64]) -> f64 {
        if rows.is_empty() {
            return 0.0;
        }
        let correct = rows.iter().zip(targets).filter(|(r, &t)| self.predict(r) == t).count();
        correct as f64 / rows.len() as f64
    }

    /// Mean hinge loss `max(0, 1 - y f(x))` over the rows.
    pub fn hinge_loss(&self, rows: &[SparseRow], targets: &[f64]) -> f64 {
        hinge(rows, targets, |r| self.decision(r))
    }
}

fn hinge(rows: &[SparseRow], targets: &[f64], f: impl Fn(&SparseRow) -> f64) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter()
        .zip(targets)
        .map(|(r, y)| (1.0 - y * f(r)).max(0.0))
        .sum::<f64>()
        / rows.len() as f64
}

/// `sum(alpha) - |w|^2 / 2`, with the bias counted in `w`.
fn dual_value(alpha: &[f64], w: &[f64], bias: f64) -> f64 {
    alpha.iter().sum::<f64>() - 0.5 * (w.iter().map(|v| v * v).sum::<f64>() + bias * bias)
}

/// Fits on `rows` with targets in {-1, +1}; `n_columns` fixes the weight length.
pub fn train_svm(rows: &[SparseRow], targets: &[f64], n_columns: usize, params: SvmParams) -> Result<LinearModel> {
    params.validate()?;
    if rows.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            found: targets.len(),
        });
    }
    if let Some(t) = targets.iter().find(|&&t| t != 1.0 && t != -1.0) {
        return Err(Error::InvalidParameter(format!("targets must be +1 or -1, got {t}")));
    }
    if !(targets.contains(&1.0) && targets.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }
    for r in rows {
        if r.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        if let Some(&c) = r.indices().iter().find(|&&c| c >= n_columns) {
            return Err(Error::ColumnOutOfRange {
                row: 0,
                col: c,
                n_columns,
            });
        }
    }

    let n = rows.len();
    let c = params.c;
    let diag: Vec<f64> = rows.iter().map(|r| r.squared_norm() + 1.0).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; n_columns];
    let mut bias = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut history = Vec::new();
    let mut converged = false;
    let mut epochs = 0;

    while epochs < params.max_epochs {
        epochs += 1;
        order.shuffle(&mut rng);
        let mut violation: f64 = 0.0;
        for &i in &order {
            let y = targets[i];
            let g = y * (rows[i].dot(&w) + bias) - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == c {
                g.max(0.0)
            } else {
                g
            };
            violation = violation.max(pg.abs());
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / diag[i]).clamp(0.0, c);
                let delta = (alpha[i] - old) * y;
                for (col, v) in rows[i].iter() {
                    w[col] += delta * v;
                }
                bias += delta;
            }
        }
        history.push(dual_value(&alpha, &w, bias));
        if violation <= params.tolerance {
            converged = true;
            break;
        }
    }

    Ok(LinearModel {
        weights: w,
        bias,
        params,
        epochs,
        converged,
        dual_objective: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(points: &[&[f64]]) -> Vec<SparseRow> {
        points.iter().map(|p| SparseRow::from_dense(p)).collect()
    }

    #[test]
    fn symmetric_pair() {
        let x = rows(&[&[-1.0, 0.0], &[1.0, 0.0]]);
        let y = [-1.0, 1.0];
        let m = train_svm(&x, &y, 2, SvmParams::default()).unwrap();
        assert_eq!(m.accuracy(&x, &y), 1.0);
        assert!(m.bias.abs() < 1e-6, "bias {}", m.bias);
        assert!(m.weights[0] > 0.0 && m.weights[1].abs() < 1e-12);
        assert!(m.converged);
    }

    #[test]
    fn any_two_distinct_points_are_separated() {
        let cases: [(&[f64], &[f64]); 3] = [
            (&[0.0, 1.0], &[1.0, 0.0]),
            (&[3.0, 3.0], &[3.0, 3.5]),
            (&[0.0, 0.0], &[0.0, 0.1]),
        ];
        for (a, b) in cases {
            let x = rows(&[a, b]);
            let y = [1.0, -1.0];
            let params = SvmParams {
                c: 1e6,
                max_epochs: 100_000,
                ..SvmParams::default()
            };
            let m = train_svm(&x, &y, 2, params).unwrap();
            assert_eq!(m.accuracy(&x, &y), 1.0, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn xor_is_not_separable() {
        let x = rows(&[&[0.0, 0.0], &[1.0, 1.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let y = [1.0, 1.0, -1.0, -1.0];
        let m = train_svm(&x, &y, 2, SvmParams::default()).unwrap();
        assert!(m.accuracy(&x, &y) <= 0.75);
    }

    #[test]
    fn dual_is_monotone_and_loss_drops() {
        let x = rows(&[&[1.0, 2.0], &[2.0, 1.0], &[0.0, 0.5], &[0.5, 0.0], &[1.0, 1.0]]);
        let y = [1.0, 1.0, -1.0, -1.0, 1.0];
        let m = train_svm(&x, &y, 2, SvmParams::default()).unwrap();
        for w in m.dual_objective.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        // all-zero model has hinge loss 1
        assert!(m.hinge_loss(&x, &y) <= 1.0);
    }

    #[test]
    fn deterministic_for_seed() {
        let x = rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0], &[0.2, 0.1]]);
        let y = [1.0, -1.0, 1.0, -1.0];
        let p = SvmParams {
            seed: 9,
            ..SvmParams::default()
        };
        assert_eq!(train_svm(&x, &y, 2, p).unwrap(), train_svm(&x, &y, 2, p).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let x = rows(&[&[1.0], &[2.0]]);
        assert!(matches!(
            train_svm(&x, &[1.0, 1.0], 1, SvmParams::default()),
            Err(Error::SingleClass)
        ));
        assert!(train_svm(&x, &[1.0, 0.0], 1, SvmParams::default()).is_err());
        let p = SvmParams {
            c: 0.0,
            ..SvmParams::default()
        };
        assert!(train_svm(&x, &[1.0, -1.0], 1, p).is_err());
    }
}
