//! Sales histories, forecasts, ingestion and the history-length gate.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::models::ModelId;
use crate::period::{Date, Frequency, Period};
use crate::{Error, Result};

/// One product's contiguous, period-aggregated sales history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SalesSeries {
    product_id: String,
    start: Period,
    values: Vec<f64>,
}

impl SalesSeries {
    /// Builds a series. Values must be non-empty, finite and non-negative.
    pub fn new(product_id: impl Into<String>, start: Period, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Length { expected: 1, actual: 0 });
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidValue(format!("sales value {v} at position {i}")));
        }
        Ok(Self { product_id: product_id.into(), start, values })
    }

    /// Product identifier.
    pub fn product_id(&self) -> &str {
        &self.product_id
    }

    /// Granularity of the history.
    pub fn frequency(&self) -> Frequency {
        self.start.frequency
    }

    /// First period.
    pub fn start(&self) -> Period {
        self.start
    }

    /// Last period.
    pub fn end(&self) -> Period {
        self.start.offset(self.values.len() - 1)
    }

    /// Units sold per period.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of periods.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a series holds at least one period.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Seasonal position of every observation.
    pub fn seasons(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).map(move |i| self.start.offset(i).season())
    }

    /// Contiguous prefix of `len` periods.
    pub fn prefix(&self, len: usize) -> Result<SalesSeries> {
        if len == 0 || len > self.values.len() {
            return Err(Error::Length { expected: self.values.len(), actual: len });
        }
        Ok(Self {
            product_id: self.product_id.clone(),
            start: self.start,
            values: self.values[..len].to_vec(),
        })
    }

    /// Appends `other`, which must start right after `self` ends.
    pub fn concat(&self, other: &SalesSeries) -> Result<SalesSeries> {
        if self.start.distance_to(other.start)? != self.values.len() as i64 {
            return Err(Error::InvalidValue(format!(
                "series for '{}' are not contiguous",
                other.product_id
            )));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Ok(Self { product_id: self.product_id.clone(), start: self.start, values })
    }

    /// Mean of the values.
    pub fn mean(&self) -> f64 {
        crate::num::mean(&self.values)
    }
}

/// A model's forecast for one product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    /// Product identifier.
    pub product_id: String,
    /// Model that produced the forecast.
    pub model_id: ModelId,
    /// First forecast period.
    pub start: Period,
    values: Vec<f64>,
}

impl ForecastResult {
    /// Builds a forecast, flooring negative values at zero.
    ///
    /// Non-finite values are rejected.
    pub fn new(
        product_id: impl Into<String>,
        model_id: ModelId,
        start: Period,
        values: Vec<f64>,
    ) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{model_id} forecast at step {i}")));
        }
        let values = values.into_iter().map(|v| v.max(0.0)).collect();
        Ok(Self { product_id: product_id.into(), model_id, start, values })
    }

    /// Forecast values, all finite and non-negative.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of forecast periods.
    pub fn horizon(&self) -> usize {
        self.values.len()
    }
}

/// Outcome of the history-length gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Validity {
    /// Two or more years of history: one-year holdout.
    FullPipeline,
    /// One to two years: shortened holdout.
    ShortHistory,
    /// Less than one year: not forecast automatically.
    Excluded,
}

/// Classifies a series by its history length.
pub fn check_validity(series: &SalesSeries) -> Validity {
    let m = series.frequency().season_length();
    match series.len() {
        n if n < m => Validity::Excluded,
        n if n < 2 * m => Validity::ShortHistory,
        _ => Validity::FullPipeline,
    }
}

/// Splits off the final `holdout` periods.
pub fn split_holdout(series: &SalesSeries, holdout: usize) -> Result<(SalesSeries, SalesSeries)> {
    let n = series.len();
    if holdout == 0 || holdout >= n {
        return Err(Error::Holdout { holdout, len: n });
    }
    let cut = n - holdout;
    let train = SalesSeries {
        product_id: series.product_id.clone(),
        start: series.start,
        values: series.values[..cut].to_vec(),
    };
    let test = SalesSeries {
        product_id: series.product_id.clone(),
        start: series.start.offset(cut),
        values: series.values[cut..].to_vec(),
    };
    Ok((train, test))
}

/// Aggregates raw `(product_id, date, quantity)` records into one series per
/// product, sorted by product id.
///
/// Quantities are summed into their containing period (returns included),
/// each period is floored at zero, and interior periods without records
/// become explicit zeros. The sum is taken over the period's quantities in
/// sorted order, so the result does not depend on record order.
pub fn ingest_sales<P, D>(records: &[(P, D, f64)], frequency: Frequency) -> Result<Vec<SalesSeries>>
where
    P: AsRef<str>,
    D: AsRef<str>,
{
    let mut buckets: BTreeMap<&str, BTreeMap<u32, Vec<f64>>> = BTreeMap::new();
    for (row, (product, date, quantity)) in records.iter().enumerate() {
        let product = product.as_ref();
        if product.trim().is_empty() {
            return Err(Error::Ingestion { row, reason: "empty product_id".to_string() });
        }
        if !quantity.is_finite() {
            return Err(Error::Ingestion { row, reason: format!("non-finite quantity {quantity}") });
        }
        let period = Date::parse(date.as_ref())
            .and_then(|d| Period::from_date(frequency, d))
            .map_err(|e| Error::Ingestion { row, reason: e.to_string() })?;
        buckets.entry(product).or_default().entry(period.index).or_default().push(*quantity);
    }

    buckets
        .into_iter()
        .map(|(product, periods)| {
            let first = *periods.keys().next().expect("bucket has at least one period");
            let last = *periods.keys().next_back().expect("bucket has at least one period");
            let mut values = Vec::with_capacity((last - first + 1) as usize);
            for index in first..=last {
                let total = periods.get(&index).map_or(0.0, |qs| {
                    let mut qs = qs.clone();
                    qs.sort_by(f64::total_cmp);
                    qs.iter().sum::<f64>()
                });
                values.push(total.max(0.0));
            }
            SalesSeries::new(product, Period::new(frequency, first), values)
        })
        .collect()
}
