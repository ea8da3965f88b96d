use alloc::vec::Vec;

use crate::models::ModelId;
use crate::{ForecastResult, Period, Result, SalesSeries};

/// Rolls a one-step predictor forward `horizon` times.
///
/// The predictor sees the working history (training values followed by
/// earlier predictions) and the period it must predict. Each prediction is
/// floored at zero before it is appended, so the floor feeds back into later
/// steps.
pub fn iterate_one_step<F>(
    mut predictor: F,
    train: &SalesSeries,
    horizon: usize,
    model_id: ModelId,
) -> Result<ForecastResult>
where
    F: FnMut(&[f64], Period) -> Result<f64>,
{
    let start = train.end().offset(1);
    let mut history: Vec<f64> = train.values().to_vec();
    history.reserve(horizon);
    for h in 0..horizon {
        let next = predictor(&history, start.offset(h))?;
        history.push(next.max(0.0));
    }
    let values = history.split_off(train.len());
    ForecastResult::new(train.product_id(), model_id, start, values)
}
