//! Lasso by cyclic coordinate descent.
//!
//! Minimizes `(1/2n)‖y - b₀ - Mβ‖² + λ‖β‖₁` with an unpenalized intercept
//! `b₀`. Each coordinate update is a soft-threshold of the partial residual
//! correlation; a sweep visits every column once and then re-centres the
//! intercept. Columns are expected to be standardized but need not be.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

const TOL: f64 = 1e-8;
const MAX_SWEEPS: usize = 10_000;

/// Coefficients of a lasso fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    /// Unpenalized intercept.
    pub intercept: f64,
    /// One coefficient per design column.
    pub coef: Vec<f64>,
    /// Sweeps performed.
    pub sweeps: usize,
    /// Penalty used.
    pub lambda: f64,
}

impl LassoFit {
    /// Prediction for row `i` of `columns`.
    pub fn predict_row(&self, columns: &[Vec<f64>], i: usize) -> f64 {
        self.intercept + columns.iter().zip(&self.coef).map(|(c, b)| c[i] * b).sum::<f64>()
    }
}

fn soft_threshold(x: f64, lambda: f64) -> f64 {
    if x > lambda {
        x - lambda
    } else if x < -lambda {
        x + lambda
    } else {
        0.0
    }
}

/// The lasso objective for a given fit, over the first `rows` rows.
pub fn objective(columns: &[Vec<f64>], target: &[f64], fit: &LassoFit, lambda: f64) -> f64 {
    let n = target.len();
    let sse: f64 = (0..n)
        .map(|i| {
            let r = target[i] - fit.predict_row(columns, i);
            r * r
        })
        .sum();
    sse / (2.0 * n as f64) + lambda * fit.coef.iter().map(|b| b.abs()).sum::<f64>()
}

/// Smallest penalty at which every coefficient is zero:
/// `max_j |M_jᵀ(y - ȳ)| / n`.
pub fn lambda_max(columns: &[Vec<f64>], target: &[f64]) -> f64 {
    let n = target.len() as f64;
    let mean = crate::num::mean(target);
    columns
        .iter()
        .map(|c| (c.iter().zip(target).map(|(x, y)| x * (y - mean)).sum::<f64>() / n).abs())
        .fold(0.0, f64::max)
}

/// Fits the lasso for one penalty.
pub fn lasso_coordinate_descent(columns: &[Vec<f64>], target: &[f64], lambda: f64) -> Result<LassoFit> {
    descend(columns, target, lambda, None, None)
}

/// As [`lasso_coordinate_descent`], recording the objective after every sweep.
pub fn lasso_coordinate_descent_traced(
    columns: &[Vec<f64>],
    target: &[f64],
    lambda: f64,
) -> Result<(LassoFit, Vec<f64>)> {
    let mut trace = Vec::new();
    let fit = descend(columns, target, lambda, None, Some(&mut trace))?;
    Ok((fit, trace))
}

fn descend(
    columns: &[Vec<f64>],
    target: &[f64],
    lambda: f64,
    warm: Option<&LassoFit>,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<LassoFit> {
    let n = target.len();
    if n == 0 {
        return Err(Error::Length { expected: 1, actual: 0 });
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::Length { expected: n, actual: c.len() });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidValue(format!("lambda {lambda}")));
    }
    if target.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("lasso target".into()));
    }
    let nf = n as f64;
    let scale: Vec<f64> = columns.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>() / nf).collect();
    let mut coef = warm.map_or_else(|| vec![0.0; columns.len()], |w| w.coef.clone());
    let mut intercept = warm.map_or_else(|| crate::num::mean(target), |w| w.intercept);
    let mut resid: Vec<f64> = (0..n)
        .map(|i| target[i] - intercept - columns.iter().zip(&coef).map(|(c, b)| c[i] * b).sum::<f64>())
        .collect();

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for (j, col) in columns.iter().enumerate() {
            if scale[j] == 0.0 {
                coef[j] = 0.0;
                continue;
            }
            let old = coef[j];
            let rho = col.iter().zip(&resid).map(|(x, r)| x * r).sum::<f64>() / nf + scale[j] * old;
            let new = soft_threshold(rho, lambda) / scale[j];
            if !new.is_finite() {
                return Err(Error::NonFinite(format!("lasso column {j}")));
            }
            let delta = new - old;
            if delta != 0.0 {
                for (r, x) in resid.iter_mut().zip(col) {
                    *r -= x * delta;
                }
                coef[j] = new;
            }
            max_change = max_change.max(delta.abs());
        }
        let shift = crate::num::mean(&resid);
        intercept += shift;
        resid.iter_mut().for_each(|r| *r -= shift);
        max_change = max_change.max(shift.abs());
        if let Some(t) = trace.as_deref_mut() {
            let sse: f64 = resid.iter().map(|r| r * r).sum();
            t.push(sse / (2.0 * nf) + lambda * coef.iter().map(|b| b.abs()).sum::<f64>());
        }
        if max_change < TOL {
            break;
        }
    }
    if !intercept.is_finite() {
        return Err(Error::NonFinite("lasso intercept".into()));
    }
    Ok(LassoFit { intercept, coef, sweeps, lambda })
}

/// Default penalty grid as fractions of [`lambda_max`]: ten log-spaced
/// points from 1 down to 1e-4.
pub fn default_lambda_ratios() -> Vec<f64> {
    (0..10).map(|i| crate::num::exp(-4.0 * core::f64::consts::LN_10 * i as f64 / 9.0)).collect()
}

/// Chooses the penalty from `ratios × λ_max` by squared error on the last
/// 20% of rows (time order) after fitting the first 80%, then refits all
/// rows with the winner. Ties go to the larger penalty.
pub fn select_lambda(columns: &[Vec<f64>], target: &[f64], ratios: &[f64]) -> Result<LassoFit> {
    let n = target.len();
    let lmax = lambda_max(columns, target);
    let mut lambdas: Vec<f64> = ratios.iter().map(|r| r * lmax).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let n_val = libm::round(n as f64 * 0.2) as usize;
    if lambdas.is_empty() {
        return Err(Error::InvalidValue("empty lambda grid".into()));
    }
    if n_val == 0 || n - n_val < 2 || lambdas.len() == 1 {
        return descend(columns, target, lambdas[0], None, None);
    }
    let n_fit = n - n_val;
    let fit_cols: Vec<Vec<f64>> = columns.iter().map(|c| c[..n_fit].to_vec()).collect();
    let mut best: Option<(f64, f64)> = None;
    let mut warm: Option<LassoFit> = None;
    for &lambda in &lambdas {
        let fit = descend(&fit_cols, &target[..n_fit], lambda, warm.as_ref(), None)?;
        let err: f64 = (n_fit..n)
            .map(|i| {
                let r = target[i] - fit.predict_row(columns, i);
                r * r
            })
            .sum();
        if best.map_or(true, |(_, e)| err < e) {
            best = Some((lambda, err));
        }
        warm = Some(fit);
    }
    let (lambda, _) = best.expect("grid is non-empty");
    descend(columns, target, lambda, None, None)
}
