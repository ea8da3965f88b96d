//! Forecast error metrics.
//!
//! RMSE carries the conventional `1/n` factor so errors over horizons of
//! different length stay comparable. nRMSE divides by the range of the
//! actuals and is undefined (`None`) when the actuals are constant. MAPE is a
//! fraction, skips periods whose actual is zero and is undefined when every
//! actual is zero.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The three error metrics for one forecast against its actuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    /// Root mean squared error.
    pub rmse: f64,
    /// RMSE over the actuals' range; `None` for constant actuals.
    pub nrmse: Option<f64>,
    /// Mean absolute percentage error as a fraction; `None` if all actuals are zero.
    pub mape: Option<f64>,
    /// Number of zero-actual periods left out of the MAPE.
    pub mape_skipped: usize,
}

impl MetricSet {
    /// Computes all three metrics.
    pub fn compute(actual: &[f64], predicted: &[f64]) -> Result<Self> {
        let rmse = compute_rmse(actual, predicted)?;
        let nrmse = range(actual).and_then(|r| (r > 0.0).then(|| rmse / r));
        let (mape, mape_skipped) = compute_mape(actual, predicted)?;
        Ok(Self { rmse, nrmse, mape, mape_skipped })
    }
}

fn check(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.is_empty() || actual.len() != predicted.len() {
        return Err(Error::Length { expected: actual.len().max(1), actual: predicted.len() });
    }
    if actual.iter().chain(predicted).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("metric input".into()));
    }
    Ok(())
}

fn range(xs: &[f64]) -> Option<f64> {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    (max >= min).then_some(max - min)
}

/// `sqrt(mean((y - ŷ)²))`.
pub fn compute_rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check(actual, predicted)?;
    let sse: f64 = actual.iter().zip(predicted).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok(crate::num::sqrt(sse / actual.len() as f64))
}

/// RMSE divided by `max(actual) - min(actual)`; `None` when the actuals are constant.
pub fn compute_nrmse(actual: &[f64], predicted: &[f64]) -> Result<Option<f64>> {
    let rmse = compute_rmse(actual, predicted)?;
    Ok(range(actual).and_then(|r| (r > 0.0).then(|| rmse / r)))
}

/// Mean of `|y - ŷ| / y` over nonzero actuals, plus the count of skipped zeros.
pub fn compute_mape(actual: &[f64], predicted: &[f64]) -> Result<(Option<f64>, usize)> {
    check(actual, predicted)?;
    let mut total = 0.0;
    let mut used = 0usize;
    for (y, p) in actual.iter().zip(predicted) {
        if *y != 0.0 {
            total += ((y - p) / y).abs();
            used += 1;
        }
    }
    let skipped = actual.len() - used;
    Ok(((used > 0).then(|| total / used as f64), skipped))
}
