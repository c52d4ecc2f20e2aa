//! Ridge regression on sparse features with an unpenalized intercept.
//!
//! Narrow problems solve the centered normal equations with a Cholesky
//! factorization; wide ones (more columns than [`DENSE_LIMIT`]) use
//! conjugate gradients on the implicit centered operator.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::features::{CsrMatrix, SparseVec};

/// Column count above which the Gram matrix is not materialized.
pub const DENSE_LIMIT: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
}

impl RidgeModel {
    pub fn predict_row(&self, row: &SparseVec) -> f64 {
        self.intercept + row.dot_dense(&self.weights)
    }
}

pub fn ridge_fit(x: &CsrMatrix, y: &[f64], lambda: f64) -> Result<RidgeModel, ModelError> {
    if x.n_rows() != y.len() {
        return Err(ModelError::DimensionMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if y.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(ModelError::InvalidHyper(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    let n = y.len() as f64;
    let d = x.n_cols;
    let y_mean = y.iter().sum::<f64>() / n;
    let mut x_mean = vec![0.0; d];
    for row in &x.rows {
        for (&j, &v) in row.indices.iter().zip(&row.values) {
            x_mean[j as usize] += v / n;
        }
    }
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    // rhs = Xcᵀ yc = Xᵀ yc (yc sums to zero).
    let mut rhs = vec![0.0; d];
    for (row, &t) in x.rows.iter().zip(&yc) {
        for (&j, &v) in row.indices.iter().zip(&row.values) {
            rhs[j as usize] += v * t;
        }
    }

    let weights = if d == 0 {
        Vec::new()
    } else if d <= DENSE_LIMIT {
        solve_dense(x, &x_mean, &rhs, lambda)?
    } else {
        solve_cg(x, &x_mean, &rhs, lambda)?
    };
    let intercept = y_mean - weights.iter().zip(&x_mean).map(|(w, m)| w * m).sum::<f64>();
    Ok(RidgeModel {
        weights,
        intercept,
        lambda,
    })
}

fn solve_dense(
    x: &CsrMatrix,
    x_mean: &[f64],
    rhs: &[f64],
    lambda: f64,
) -> Result<Vec<f64>, ModelError> {
    let d = x.n_cols;
    let n = x.n_rows() as f64;
    // Xcᵀ Xc = Xᵀ X - n μ μᵀ
    let mut gram = DMatrix::<f64>::zeros(d, d);
    for row in &x.rows {
        for (a, (&i, &vi)) in row.indices.iter().zip(&row.values).enumerate() {
            for (&j, &vj) in row.indices[a..].iter().zip(&row.values[a..]) {
                gram[(i as usize, j as usize)] += vi * vj;
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = gram[(i, j)] - n * x_mean[i] * x_mean[j];
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
        gram[(i, i)] += lambda;
    }
    let b = DVector::from_column_slice(rhs);
    match gram.clone().cholesky() {
        Some(chol) => Ok(chol.solve(&b).iter().copied().collect()),
        None if lambda == 0.0 => {
            // Positive semi-definite: accept only if an LU solve is clean.
            let lu = gram.clone().lu();
            match lu.solve(&b) {
                Some(w)
                    if w.iter().all(|v| v.is_finite())
                        && (&gram * &w - &b).norm() <= 1e-8 * (1.0 + b.norm()) =>
                {
                    Ok(w.iter().copied().collect())
                }
                _ => Err(ModelError::SingularSystem),
            }
        }
        None => Err(ModelError::SingularSystem),
    }
}

fn solve_cg(
    x: &CsrMatrix,
    x_mean: &[f64],
    rhs: &[f64],
    lambda: f64,
) -> Result<Vec<f64>, ModelError> {
    let d = x.n_cols;
    let mean_dot = |v: &[f64]| x_mean.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    // v ↦ Xcᵀ Xc v + λ v
    let apply = |v: &[f64], out: &mut [f64]| {
        let mu_v = mean_dot(v);
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut col_sum = 0.0;
        for row in &x.rows {
            let t = row.dot_dense(v) - mu_v;
            col_sum += t;
            for (&j, &val) in row.indices.iter().zip(&row.values) {
                out[j as usize] += val * t;
            }
        }
        for j in 0..d {
            out[j] += lambda * v[j] - x_mean[j] * col_sum;
        }
    };

    let mut w = vec![0.0; d];
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; d];
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let tol = 1e-20 * rr.max(1e-300);
    let max_iter = (10 * d).max(100);
    for _ in 0..max_iter {
        if rr <= tol {
            break;
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 || !pap.is_finite() {
            if lambda == 0.0 {
                return Err(ModelError::SingularSystem);
            }
            break;
        }
        let alpha = rr / pap;
        for j in 0..d {
            w[j] += alpha * p[j];
            r[j] -= alpha * ap[j];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        for j in 0..d {
            p[j] = r[j] + beta * p[j];
        }
        rr = rr_new;
    }
    Ok(w)
}

pub fn ridge_predict(model: &RidgeModel, x: &CsrMatrix) -> Result<Vec<f64>, ModelError> {
    if x.n_cols != model.weights.len() {
        return Err(ModelError::DimensionMismatch {
            expected: model.weights.len(),
            found: x.n_cols,
        });
    }
    Ok(x.rows.iter().map(|r| model.predict_row(r)).collect())
}
